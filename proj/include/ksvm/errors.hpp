#ifndef KSVM_ERRORS_HPP
#define KSVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ksvm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed arguments: wrong label values, empty datasets, bad configs.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// Vector/model dimension disagreement. Separate from InvalidInput so the
/// CLI can map it to its own exit code.
class DimensionError : public InvalidInput {
public:
    explicit DimensionError(const std::string& msg) : InvalidInput(msg) {}
};

/// Kernel evaluated outside its mathematical domain (e.g. negative base
/// raised to a fractional exponent).
class KernelDomainError : public Error {
public:
    explicit KernelDomainError(const std::string& msg) : Error(msg) {}
};

/// Malformed file content. Carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Margin calibration impossible: no correctly classified sample of the
/// target class to measure against.
class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& msg) : Error(msg) {}
};

/// No training point qualifies as a strictly feasible starting seed for the
/// requested margin.
class InfeasibleSeedError : public Error {
public:
    explicit InfeasibleSeedError(const std::string& msg) : Error(msg) {}
};

/// File could not be opened or read. Separate from ParseError so the CLI can
/// map missing files to their own exit code.
class FileError : public Error {
public:
    explicit FileError(const std::string& msg) : Error(msg) {}
};

} // namespace ksvm

#endif
