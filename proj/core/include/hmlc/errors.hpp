#pragma once

#include <stdexcept>
#include <string>

namespace hmlc {

/// Bad inputs: malformed configs, schema mismatches, invalid label symbols,
/// dimension mismatches. Maps to CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values where finite ones are required (loss, logits).
/// Maps to CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hmlc
