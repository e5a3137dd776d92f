#pragma once

#include <stdexcept>

namespace refgame {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// tree construction
struct IndexOutOfRange : Error { using Error::Error; };
struct MultipleRoots : Error { using Error::Error; };
struct Cycle : Error { using Error::Error; };
struct DisconnectedNode : Error { using Error::Error; };
struct ZeroNodes : Error { using Error::Error; };

// reward schemes and parameters
struct InvalidBase : Error { using Error::Error; };
struct NotMonotone : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct BudgetViolation : Error { using Error::Error; };

// equilibrium computation
struct PreconditionViolation : Error { using Error::Error; };
struct InvalidBeta : Error { using Error::Error; };

// simulation statistics
struct ZeroVariance : Error { using Error::Error; };

// file formats
struct ParseError : Error { using Error::Error; };

}  // namespace refgame
