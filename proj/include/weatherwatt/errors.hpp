#pragma once

#include <stdexcept>
#include <string>

namespace ww {

/// Base class for all weatherwatt errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix inversion hit a pivot below the singularity threshold,
/// typically caused by collinear feature columns.
class SingularMatrixError : public Error {
public:
    explicit SingularMatrixError(const std::string& what) : Error(what) {}
};

/// A statistic is undefined because an input vector is constant
/// (zero variance target or feature).
class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& what) : Error(what) {}
};

/// Shape mismatch between operands.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/// CSV ingestion failure: missing file, bad header, schema mismatch.
class IngestError : public Error {
public:
    explicit IngestError(const std::string& what) : Error(what) {}
};

/// Invalid configuration value or unparseable config file.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// An iterative numeric routine failed to converge.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

} // namespace ww
