#pragma once

#include <stdexcept>
#include <string>

namespace adlkit {

// Malformed input text (class files, bitstreams).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain invariant was violated (non-finite value, extent mismatch, ...).
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A parameter lies outside its documented range, or a size guard tripped.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A codeword could not be decoded (truncated or malformed bits).
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace adlkit
