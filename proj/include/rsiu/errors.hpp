#pragma once
#include <stdexcept>
#include <string>

namespace rsiu {

// Shape mismatch between supplied containers (wrong sample count, dimension, ...).
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside its mathematical domain (eta >= 1, non-positive mean, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A budget that cannot cover the mandatory minimum spend.
struct InfeasibleBudget : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exact tie where a strict gap is required (caller must break ties first).
struct TieError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Fewer pilot samples than the estimators need.
struct InsufficientPilot : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Objective with no defined minimizer (all variance terms zero).
struct UndefinedObjective : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative numeric routine failed to converge.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rsiu
