#pragma once

#include <stdexcept>
#include <string>

namespace htqc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- scenario ---
struct LoadNotCritical : Error {
    using Error::Error;
};
struct NonPositiveParameter : Error {
    using Error::Error;
};
struct InitialStateOutsideDomain : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};

// --- fbp ---
struct NoConvergence : Error {
    using Error::Error;
};
struct GridTooCoarse : Error {
    using Error::Error;
};
struct BoundaryNotFound : Error {
    using Error::Error;
};

// --- reflect ---
struct EmptyPath : Error {
    using Error::Error;
};
struct InvalidInterval : Error {
    using Error::Error;
};
struct BiasBudgetExceeded : Error {
    using Error::Error;
};

// --- qsim ---
struct HorizonNonPositive : Error {
    using Error::Error;
};
struct SimInvariantViolation : Error {
    using Error::Error;
};

// --- mdp / cli ---
struct UnsupportedPrimitives : Error {
    using Error::Error;
};

// --- metrics ---
struct NoAdmissions : Error {
    using Error::Error;
};
struct MismatchedScenarios : Error {
    using Error::Error;
};

// --- cli ---
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace htqc
