#pragma once

#include <stdexcept>
#include <string>

namespace mfgfn {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Config file / override parsing and validation failures (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// An action was applied to a state whose mask forbids it.
struct IllegalActionError : Error {
    using Error::Error;
};

/// Oracle input outside its domain.
struct DomainError : Error {
    using Error::Error;
};

/// Sequence token outside the vocabulary.
struct InvalidTokenError : Error {
    using Error::Error;
};

/// Enumeration request above the configured cap.
struct TooLargeError : Error {
    using Error::Error;
};

/// Linear-algebra failure that survived jitter escalation (CLI exit code 3).
struct NumericalError : Error {
    using Error::Error;
};

/// Reward must be strictly positive for trajectory-balance training.
struct NonPositiveRewardError : Error {
    using Error::Error;
};

/// Training loss became non-finite.
struct DivergenceError : Error {
    using Error::Error;
};

/// Metric asked of an empty set.
struct EmptySetError : Error {
    using Error::Error;
};

/// Pairwise metric asked of fewer than two objects.
struct TooFewError : Error {
    using Error::Error;
};

/// Plot input directory is missing required files.
struct MissingDataError : Error {
    using Error::Error;
};

}  // namespace mfgfn
