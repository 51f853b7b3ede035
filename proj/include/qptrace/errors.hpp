#pragma once

#include <stdexcept>
#include <string>

namespace qptrace {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or contract-violating input (bad coefficients, degree order, ...).
struct InvalidInput : Error {
    using Error::Error;
};

// An iteration failed to converge within its cap.
struct NumericFailure : Error {
    using Error::Error;
};

// Evaluation left the numerically representable domain (exp overflow guard).
struct OutOfDomain : Error {
    using Error::Error;
};

// f_s vanished where a division by it was required (defect point,
// singular sensitivity).
struct SingularDerivative : Error {
    using Error::Error;
};

// b vanishes at the requested boundary point; no crossing is possible there.
struct BoundaryPole : Error {
    using Error::Error;
};

// a or b vanishes at a boundary zero, so the crossing direction is undefined.
struct DegenerateCrossing : Error {
    using Error::Error;
};

// The independent zero-count could not be certified (contour too close to a
// zero, or phase accumulation ambiguous).
struct VerificationUnavailable : Error {
    using Error::Error;
};

}  // namespace qptrace
