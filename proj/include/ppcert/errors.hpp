#pragma once

#include <stdexcept>
#include <string>

namespace ppcert {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two values at different moduli were combined.
struct ModulusMismatchError : Error {
  using Error::Error;
};

// A matrix whose determinant is not a unit was inverted or admitted
// as a generator.
struct NotInvertibleError : Error {
  using Error::Error;
};

// A precondition on the arguments was violated (non-divisor level,
// non-coprime pair, out-of-range modulus, membership violation).
struct DomainError : Error {
  using Error::Error;
};

// Group enumeration would exceed the configured element ceiling.
struct SizeCeilingError : Error {
  using Error::Error;
};

// A caller-side contract was broken in a way that signals a deeper bug,
// e.g. an odd orbit reaching the degree dictionary at level n > 2.
struct ContractViolationError : Error {
  using Error::Error;
};

// An internal consistency check failed (Goursat audit, soundness breach).
struct InternalInvariantError : Error {
  using Error::Error;
};

// Malformed input record.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace ppcert
