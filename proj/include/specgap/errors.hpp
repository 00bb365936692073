#pragma once

#include <stdexcept>
#include <string>

namespace specgap {

// Invalid inputs (bad intervals, violated preconditions) throw
// std::invalid_argument directly; the types below cover failures that
// originate inside a numerical routine.

class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, long dim, double condition_estimate)
        : std::runtime_error(what), dim_(dim), condition_(condition_estimate) {}

    long dim() const noexcept { return dim_; }
    double condition_estimate() const noexcept { return condition_; }

private:
    long dim_;
    double condition_;
};

class assembly_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace specgap
