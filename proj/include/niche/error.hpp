#pragma once

#include <stdexcept>
#include <string>

namespace niche {

/// Invalid user input: bad parameter ranges, malformed config documents.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a call was violated (dimension mismatch,
/// point outside the domain, grid that cannot resolve a length scale).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a result (retry cap hit,
/// degenerate normalizer).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace niche
