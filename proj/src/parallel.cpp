#include "brokerid/parallel.hpp"

#include <omp.h>

namespace brokerid {

namespace {
int default_threads = -1;
}

void set_num_threads(int threads) {
    if (default_threads < 0) {
        default_threads = omp_get_max_threads();
    }
    omp_set_num_threads(threads > 0 ? threads : default_threads);
}

int num_threads() { return omp_get_max_threads(); }

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, const char* label) {
    // FNV-1a over the label, then mixed with the parent.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = label; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    return mix64(parent ^ mix64(h));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace brokerid
