#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy for the workbench. Every failure mode that a caller can
// meaningfully react to gets its own type; everything else is a plain
// std::invalid_argument from the constructor that rejected the input.

namespace tmodlab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Field and Laurent layer
struct ZeroDivisor : Error { using Error::Error; };
struct CtxMismatch : Error { using Error::Error; };
struct InseparableTwist : Error { using Error::Error; };
struct InseparableElement : Error { using Error::Error; };
struct BadDenominator : Error { using Error::Error; };

// Tate layer
struct DivergentTail : Error { using Error::Error; };
struct TruncationMismatch : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };

// t-module layer
struct NotNilpotent : Error { using Error::Error; };
struct PrecisionExhausted : Error { using Error::Error; };
struct OutsideRadius : Error { using Error::Error; };

// analytic layer
struct InsufficientRamification : Error { using Error::Error; };
struct NoRootInRange : Error { using Error::Error; };
struct TowerDiverges : Error { using Error::Error; };
struct NotUniformizableEvidence : Error { using Error::Error; };

// frame layer
struct UnsupportedFamily : Error { using Error::Error; };
struct IntertwiningFails : Error { using Error::Error; };
struct SingularUpsilon : Error { using Error::Error; };
struct NotASolution : Error { using Error::Error; };
struct NotExpPair : Error { using Error::Error; };
struct VNotUnimodular : Error { using Error::Error; };
struct WitnessMismatch : Error { using Error::Error; };

// prolongation layer
struct InsufficientProlongation : Error { using Error::Error; };

// configuration and IO
struct ConfigError : Error { using Error::Error; };

} // namespace tmodlab
