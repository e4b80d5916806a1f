#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brokerid {

/// Malformed input text (edge list, cascade JSONL, definition strings).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input parsed but violates a structural invariant (self-loop, duplicate, time order).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A user id in a cascade file is not in the graph's label map.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A feature recipe references a base feature that is not configured.
class DefinitionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateSplitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Feature columns of two domains do not line up.
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage needs an artifact produced by an earlier stage.
class DependencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace brokerid
