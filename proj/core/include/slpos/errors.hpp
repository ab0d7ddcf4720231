#pragma once

#include <stdexcept>
#include <string>

namespace slpos {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (bad layout dimensions, missing
// entities, sweep axis incompatible with the method, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry: collinear/coplanar anchors, parallel bearings,
// coincident nodes. Distinct from ConfigurationError so callers can tell a
// bad drop from a bad config.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Anchor selection asked for more anchors than the scenario provides.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// A statistical model cannot produce samples (e.g. truncation interval with
// negligible mass under the parent normal).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A node lacks the hardware capability a measurement requires.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Illegal event for the current protocol session state.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Operation invoked on a session in the wrong lifecycle state.
class StateError : public Error {
 public:
  using Error::Error;
};

// Caller misuse of an API or CLI (empty input, unknown key, bad flag).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace slpos
