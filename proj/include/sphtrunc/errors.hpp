#pragma once

#include <stdexcept>
#include <string>

namespace sphtrunc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series or iteration failed to reach its tolerance within the hard cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sample without usable spread (e.g. every lag-r gap is zero).
class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough data points for a least-squares fit.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphtrunc
