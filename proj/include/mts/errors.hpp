#pragma once

#include <stdexcept>
#include <string>

namespace mts {

// Base class for every error thrown by this library.  Catching mts::Error at
// the CLI boundary is enough to turn any failure into a diagnostic line and a
// nonzero exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// A constructed object or option set is internally inconsistent (bad
// hyperparameter, unknown method name, missing threshold entry, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "configuration"; }
};

// Dimensions of two values that must agree do not (feature width, vote row
// length, label count, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

// A value passed to an operation is outside its domain (empty report list,
// fraction outside [0,1], label out of range, ...).
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

// Raw data could not be turned into a dataset (unparseable cell, ragged row,
// unknown class name, non-finite feature, checksum mismatch).
class IngestionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ingestion"; }
};

// The filesystem said no (missing file, unwritable output directory).
class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

// Input is well-formed but too degenerate for the requested operation
// (splitting a class with fewer than two instances, empty training set).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate-input"; }
};

// A mathematical precondition of a theorem-verification routine does not hold
// for the supplied model.
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

}  // namespace mts
