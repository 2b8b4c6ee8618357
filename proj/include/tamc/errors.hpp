#ifndef TAMC_ERRORS_HPP
#define TAMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tamc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Clock index outside the zone dimension, or mismatched dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Value outside the operation's domain (e.g. negative clock assignment).
class DomainError : public Error {
public:
    using Error::Error;
};

// Unknown instance, location, clock or variable name.
class NameError : public Error {
public:
    using Error::Error;
};

// Exploration stored more states than allowed.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Structurally invalid model or unsupported construct.
class ModelError : public Error {
public:
    using Error::Error;
};

}  // namespace tamc

#endif  // TAMC_ERRORS_HPP
