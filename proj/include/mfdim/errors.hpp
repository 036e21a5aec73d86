#pragma once

#include <stdexcept>
#include <string>

namespace mfdim {

// Invalid inputs detected while building a measure (bad ratios, masses that
// do not sum, overlapping child intervals, ...).
class ConstructionError : public std::runtime_error {
public:
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument to a query (r <= 0, n beyond depth, dimension mismatch, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// nu(B) > 0 while mu(B) = 0: the standing hypothesis supp nu <= supp mu is broken.
class SupportViolationError : public std::runtime_error {
public:
    explicit SupportViolationError(const std::string& what) : std::runtime_error(what) {}
};

// An estimator could not produce a value (too few valid series entries,
// bisection bracket failure, empty sample, ...).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

}  // namespace mfdim
