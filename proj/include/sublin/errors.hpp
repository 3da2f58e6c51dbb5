#pragma once

#include <stdexcept>
#include <string>

namespace sublin {

/// A hypothesis or inequality required by an analysis does not hold.
/// Carries the inequality's label and both sides when they are numbers.
class ConditionError : public std::runtime_error {
public:
    ConditionError(std::string name, double lhs, double rhs, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)), lhs_(lhs), rhs_(rhs)
    {
    }
    const std::string& name() const { return name_; }
    double lhs() const { return lhs_; }
    double rhs() const { return rhs_; }

private:
    std::string name_;
    double lhs_;
    double rhs_;
};

/// An iterative method failed: no convergence, singular system, lost positivity.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sublin
