// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace facever {

/// Failure categories. The CLI maps each one to a fixed exit code.
enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kAlignmentDegenerate,
  kEmptyFeature,
  kSingularScatter,
  kDegenerateClient,
  kUnknownClient,
  kBadManifest,
  kBadConfig,
  kBadModel,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace facever
