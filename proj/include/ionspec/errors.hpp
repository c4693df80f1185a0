#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ionspec {

/// Invalid grid sizes, mismatched operands, bad parameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Config document validation failure tied to a key path such as "species[0].D".
class ValidationError : public ConfigError {
public:
    ValidationError(std::string key_path, const std::string& message)
        : ConfigError(key_path.empty() ? message : key_path + ": " + message),
          key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

/// Operator applied outside its mathematical domain (e.g. negative powers on a constant).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Gevrey multiplier would exceed the largest finite double.
class GevreyOverflowError : public std::overflow_error {
public:
    GevreyOverflowError(int k1, int k2, const std::string& what)
        : std::overflow_error(what), k1_(k1), k2_(k2) {}

    int k1() const noexcept { return k1_; }
    int k2() const noexcept { return k2_; }

private:
    int k1_;
    int k2_;
};

/// Operation called on the wrong model variant or on stale caches.
class UsageError : public std::logic_error {
public:
    explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

/// A coefficient became NaN or infinite during time stepping.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::int64_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed time series (non-monotone time grid, empty history).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class SnapshotVersionError : public IoError {
public:
    using IoError::IoError;
};

class SnapshotTruncatedError : public IoError {
public:
    using IoError::IoError;
};

class SnapshotChecksumError : public IoError {
public:
    using IoError::IoError;
};

/// Appending a row whose columns differ from the header already in the file.
class SchemaError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace ionspec
