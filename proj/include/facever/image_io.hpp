// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/imaging.hpp"

#include <filesystem>

namespace facever {

/// Reads an 8-bit RGB image (PNG or binary PPM). Throws kIo on failure.
RawImage read_image(const std::filesystem::path& path);

/// Writes a binary PPM (P6). Throws kIo on failure.
void write_ppm(const std::filesystem::path& path, const RawImage& img);

}  // namespace facever
