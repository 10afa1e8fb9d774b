// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/error.hpp"

namespace facever::cli {

inline constexpr int kExitAccept = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnknownClient = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitBadManifest = 5;
inline constexpr int kExitDegenerateClient = 6;
inline constexpr int kExitSingularScatter = 7;
inline constexpr int kExitBadModel = 8;

int exit_code(ErrorKind kind);

/// Parses arguments, runs one subcommand and returns the process exit code.
int run(int argc, char** argv);

}  // namespace facever::cli
