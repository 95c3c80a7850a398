#pragma once

#include <stdexcept>
#include <string>

namespace crsim {

// Base class for all errors raised by the simulator library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unknown or side-mismatched action label.
struct TaxonomyError : Error {
    using Error::Error;
};

// Malformed input file (corpus, table, template bank, config).
struct ParseError : Error {
    using Error::Error;
};

// Value outside its declared range.
struct RangeError : Error {
    using Error::Error;
};

// Reference to an id that does not resolve (e.g. rating for an unknown item).
struct ReferentialError : Error {
    using Error::Error;
};

// Estimation attempted on an empty or unusable corpus.
struct EstimationError : Error {
    using Error::Error;
};

// Profile sampling cannot satisfy its constraints.
struct SamplingError : Error {
    using Error::Error;
};

// Template bank does not cover a required action kind.
struct CoverageError : Error {
    using Error::Error;
};

// Template placeholder without a matching slot value.
struct SlotError : Error {
    using Error::Error;
};

// Invalid argument to a metric or campaign operation.
struct ArgumentError : Error {
    using Error::Error;
};

// Invalid experiment / simulator / endpoint configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Transport-level failure talking to an agent (timeout, disconnect).
struct TransportError : Error {
    using Error::Error;
};

}  // namespace crsim
