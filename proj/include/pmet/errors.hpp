#pragma once

#include <stdexcept>
#include <string>

namespace pmet {

// Thrown when an operation is invoked before its declared prerequisite,
// e.g. a condition check with an unaudited gauge function.
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

// Thrown when a computation would exceed a declared resource budget.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmet
