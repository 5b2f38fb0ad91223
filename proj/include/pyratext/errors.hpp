#pragma once

#include <stdexcept>
#include <string>

namespace pyratext {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor extents or model widths that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Violated precondition (bad index, non-scalar loss, empty input...).
class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with dataset files or their contents.
class DataError : public Error {
public:
    using Error::Error;
};

/// Corrupt or truncated binary files; `offset` is the byte where decoding failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Non-finite values during training.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Metric undefined for the given records (e.g. AUC with a single class).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

} // namespace pyratext
