#pragma once

#include <stdexcept>

namespace fairdiv {

/// Malformed or inconsistent input document (instance, allocation, rational).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An exhaustive search would exceed the configured candidate budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Payments are undefined: the envy graph contains a positive-weight cycle.
struct CycleError : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace fairdiv
