#pragma once

#include <stdexcept>
#include <string>

namespace nws {

/// Base class for every error raised by the synthesis library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed an argument outside an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data (control values, audio) is non-finite or otherwise unusable.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Model file bytes are malformed: bad magic, version, JSON, or truncation.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Tensors or configuration disagree with the expected model layout.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Streaming chunk does not line up with the model's hop grid.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for its inputs (e.g. silent reference).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

} // namespace nws
