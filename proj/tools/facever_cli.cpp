// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

int main(int argc, char** argv) { return facever::cli::run(argc, argv); }
