// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dostriage {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct SizeMismatch : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct TooFewRows : Error {
  using Error::Error;
};
struct MissingColumn : Error {
  explicit MissingColumn(const std::string& name)
      : Error("missing column: " + name) {}
};
struct EmptyFile : Error {
  using Error::Error;
};
struct UnknownLabel : Error {
  explicit UnknownLabel(const std::string& value)
      : Error("unknown label: " + value) {}
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct MissingClass : Error {
  using Error::Error;
};
struct KTooLarge : Error {
  using Error::Error;
};
struct NegativeDistance : Error {
  using Error::Error;
};
struct NonFiniteCovariance : Error {
  using Error::Error;
};
struct NonFiniteActivation : Error {
  using Error::Error;
};
struct EmptyTrace : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct InsufficientAcceptedReplicates : Error {
  using Error::Error;
};

}  // namespace dostriage
