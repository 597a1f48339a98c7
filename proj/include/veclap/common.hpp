#pragma once

#include <stdexcept>
#include <string>

namespace veclap {

/// Bad user input: malformed files, inconsistent dimensions, invalid
/// configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: rank-deficient stencils, solver breakdown, blow-up
/// during time integration. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Local least-squares system too ill-conditioned to trust (condition
/// estimate of the normal matrix above 1e12).
class RankDeficientError : public NumericalError {
public:
    RankDeficientError(double cond, int point_index);
    double cond() const { return cond_; }
    int point_index() const { return point_index_; }

private:
    double cond_;
    int point_index_;
};

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_full(double x);

} // namespace veclap
