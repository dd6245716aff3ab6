#pragma once

#include <stdexcept>
#include <string>

namespace endstyle {

// Error taxonomy shared by all modules. Everything derives from Error so the
// CLI boundary can catch a single type and map it to an exit code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or unwritable file.
struct IoError : Error {
  using Error::Error;
};

// A CSV/TSV row that violates the declared schema (wrong column count,
// bad label value, empty mandatory field). Message names the row.
struct MalformedRowError : Error {
  using Error::Error;
};

// Not enough data to perform the requested operation.
struct InsufficientDataError : Error {
  using Error::Error;
};

// An argument violates an operation precondition.
struct InvalidInputError : Error {
  using Error::Error;
};

// Operation called on an object in the wrong lifecycle state
// (e.g. transform before fit, tag before train).
struct InvalidStateError : Error {
  using Error::Error;
};

// Training data that makes the learning problem ill-posed
// (e.g. a single class).
struct DegenerateDataError : Error {
  using Error::Error;
};

struct InvalidConfigError : Error {
  using Error::Error;
};

// Optimization diverged; message reports the failing step.
struct TrainingFailureError : Error {
  using Error::Error;
};

}  // namespace endstyle
