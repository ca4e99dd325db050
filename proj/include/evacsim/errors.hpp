#pragma once

#include <stdexcept>
#include <string>

namespace evacsim {

// Base class for all errors raised by the simulator.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// T_S < T_A + T_EL: no time left to evacuate.
struct NegativeDeadline : Error {
    using Error::Error;
};

// Speeds non-positive or worst-case faster than typical.
struct InvalidSpeed : Error {
    using Error::Error;
};

// Scenario file is malformed (bad JSON, wrong types, unknown keys).
struct ParseError : Error {
    using Error::Error;
};

// Graph or config violates a structural invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Layout generator cannot meet the requested node/edge counts.
struct InfeasibleLayout : Error {
    using Error::Error;
};

// Distance maps requested with the exit in the blocked set.
struct ExitBlocked : Error {
    using Error::Error;
};

// Snapshot retention was violated (internal bug, not user error).
struct MissingSnapshot : Error {
    using Error::Error;
};

// Snapshot recorded at a timestamp <= the last recorded one.
struct NonMonotonicTime : Error {
    using Error::Error;
};

// Placement asked for more evacuees than eligible capacity.
struct CapacityExceeded : Error {
    using Error::Error;
};

// Inconsistent simulation or harness configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Conservation audit failed (internal bug detector).
struct AuditFailure : Error {
    using Error::Error;
};

// Aggregation needs at least two samples.
struct InsufficientSamples : Error {
    using Error::Error;
};

// Ratio requested without a baseline row in the table.
struct MissingBaseline : Error {
    using Error::Error;
};

// Filesystem failure while exporting or reading.
struct IoError : Error {
    using Error::Error;
};

}  // namespace evacsim
