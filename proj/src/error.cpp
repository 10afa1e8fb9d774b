// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/error.hpp"

namespace facever {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kAlignmentDegenerate: return "alignment-degenerate";
    case ErrorKind::kEmptyFeature: return "empty-feature";
    case ErrorKind::kSingularScatter: return "singular-scatter";
    case ErrorKind::kDegenerateClient: return "degenerate-client";
    case ErrorKind::kUnknownClient: return "unknown-client";
    case ErrorKind::kBadManifest: return "bad-manifest";
    case ErrorKind::kBadConfig: return "bad-config";
    case ErrorKind::kBadModel: return "bad-model";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace facever
