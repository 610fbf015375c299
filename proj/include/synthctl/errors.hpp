#pragma once

#include <stdexcept>
#include <string>

namespace synthctl {

// Bad inputs or configuration: malformed files, inconsistent panel shapes,
// unknown unit ids. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure in the weight solver or the LP. Exit code 3.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, int iterations = 0,
                double primal_residual = 0.0, double dual_residual = 0.0)
        : std::runtime_error(msg),
          iterations(iterations),
          primal_residual(primal_residual),
          dual_residual(dual_residual) {}

    int iterations;
    double primal_residual;
    double dual_residual;
};

// Filesystem failure. Exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace synthctl
