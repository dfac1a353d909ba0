#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agentcap {

enum class ErrorCode {
    Parse,
    Validation,
    Budget,
    EmptySelection,
    EmptyFeasibleSet,
    Convergence,
    UndefinedPoint,
    UnsupportedCost,
    Differentiability,
    Interiority,
    DegenerateScaling,
    DegenerateDiscount,
    DegenerateFit,
    SingularJacobian,
    Configuration,
};

const char* to_string(ErrorCode code);

// All library failures derive from this; the CLI maps `code()` to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Iterative solver ran out of iterations; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate)
        : Error(ErrorCode::Convergence, what), last_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_; }

private:
    std::vector<double> last_;
};

class SingularJacobianError : public Error {
public:
    SingularJacobianError(const std::string& what, double condition)
        : Error(ErrorCode::SingularJacobian, what), condition_(condition) {}

    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace agentcap
