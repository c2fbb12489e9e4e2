#pragma once

#include <stdexcept>
#include <string>

namespace maskcert {

// I/O-level failure talking to an external classifier process
// (EOF, timeout, broken pipe, dead child).
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The process answered, but not in the shape the line protocol requires
// (bad JSON, wrong id, wrong score count, non-finite score).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative numerical routine exhausted its iteration cap.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact enumeration would exceed the configured cap.
struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation invoked with a sampler or ensemble mode it does not accept.
struct InvalidModeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace maskcert
