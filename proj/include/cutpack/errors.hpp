#pragma once

#include <stdexcept>
#include <string>

namespace cutpack {

/// An internal guarantee of one of the algorithms failed. Indicates a bug or
/// an input that violated a documented precondition.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

/// A search or iteration limit was reached before completion.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline void ensure(bool condition, const std::string& message) {
    if (!condition) {
        throw InvariantViolation(message);
    }
}

} // namespace cutpack
