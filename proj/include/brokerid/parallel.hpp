#pragma once

#include <cstdint>

namespace brokerid {

/// Selects the kernel flavor. Serial kernels are the reference implementations.
enum class Exec { serial, parallel };

/// Sets the OpenMP worker count; 0 restores the runtime default.
void set_num_threads(int threads);
int num_threads();

/// Stable 64-bit mixing (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a label, independent of platform hashing.
std::uint64_t derive_seed(std::uint64_t parent, const char* label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

} // namespace brokerid
