#ifndef PARAMRED_ERRORS_HPP
#define PARAMRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace paramred {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input: shape mismatches, bad indices, parse
// failures, non-positive weights.
class InputError : public Error {
 public:
  using Error::Error;
};

// A matrix required to be positive semidefinite is not.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation (e.g. a non-SPD
// matrix passed to a symmetric logarithm).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Principal matrix logarithm does not exist or is ill-conditioned
// (rotation angle at or near pi).
class LogBranchError : public Error {
 public:
  using Error::Error;
};

// Gas-law base 1 + (gamma-1)/2 * v/c0 became non-positive during piston
// evaluation or integration.
class GasLawError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid composite object (e.g. TT cores with mismatched
// bond dimensions).
class StructureError : public Error {
 public:
  using Error::Error;
};

// Two factorizations passed to unitary_equivalence do not share the same
// correlation matrix.
class FactorizationMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace paramred

#endif  // PARAMRED_ERRORS_HPP
