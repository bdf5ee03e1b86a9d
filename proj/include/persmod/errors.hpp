#pragma once

#include <stdexcept>
#include <string>

namespace pm {

// A documented precondition of an operation does not hold for its inputs.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A constructed or supplied object failed exact verification.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A randomized search ran out of trials. Nothing unverified is ever returned.
struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data that cannot be parsed into the documented format.
struct MalformedInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pm
