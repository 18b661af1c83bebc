#pragma once

#include <stdexcept>
#include <string>

namespace tilesub {

/// Invalid geometric input (non-finite coordinates, degenerate or self-intersecting polygons).
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed rule or patch document; the message carries the offending field path.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rule or patch that parses but violates a semantic requirement.
class RuleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Predicted output exceeds the configured tile cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPrimitiveError : public RuleError {
public:
    using RuleError::RuleError;
};

class InfiniteOrientationsError : public RuleError {
public:
    using RuleError::RuleError;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tilesub
