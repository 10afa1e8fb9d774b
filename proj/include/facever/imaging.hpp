// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace facever {

/// 8-bit RGB raster, row-major, three interleaved channels per pixel.
struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RawImage() = default;
  RawImage(int w, int h);

  std::uint8_t& at(int row, int col, int channel) {
    return pixels[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  std::uint8_t at(int row, int col, int channel) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  bool valid() const {
    return width > 0 && height > 0 &&
           pixels.size() == static_cast<std::size_t>(width) * height * 3;
  }
};

/// Aligned face: luma in [0,1] plus the two chroma planes in [0,255].
struct FaceSample {
  Matrix grey;
  Matrix cr;
  Matrix cb;
  std::string subject_id;
  int session = 0;
};

/// A point in pixel coordinates, (row, col) with pixel centres on integers.
struct PixelPoint {
  double row = 0.0;
  double col = 0.0;

  bool operator==(const PixelPoint&) const = default;
};

struct GeometryConfig {
  int rows = 61;
  int cols = 57;
  PixelPoint left_eye_target{0.38, 0.30};   // fractions of the crop
  PixelPoint right_eye_target{0.38, 0.70};

  /// Throws kBadConfig when the invariants do not hold.
  void validate() const;

  /// Eye target in crop pixel coordinates: fraction * (extent - 1), so the
  /// unit square spans the pixel centres of the crop.
  PixelPoint left_target_px() const;
  PixelPoint right_target_px() const;

  bool operator==(const GeometryConfig&) const = default;
};

struct Ycc {
  double y;
  double cr;
  double cb;
};

/// Full-range BT.601 conversion. Outputs are clamped to [0,255].
Ycc rgb_to_ycbcr(double r, double g, double b);

/// Inverse of rgb_to_ycbcr (unclamped), used by the synthetic generator.
void ycbcr_to_rgb(double y, double cr, double cb, double& r, double& g, double& b);

struct AlignResult {
  FaceSample sample;
  /// Number of output pixels whose source location fell outside the image.
  int out_of_bounds = 0;
};

/// Warps img so that the annotated eyes land on the geometry's eye targets
/// (rotation + uniform scale + translation) and samples rows x cols planes by
/// bilinear interpolation. Source points outside the image are filled with the
/// mean of the corresponding source plane.
AlignResult align_and_crop(const RawImage& img, PixelPoint left_eye, PixelPoint right_eye,
                           const GeometryConfig& geo);

struct SkinBounds {
  double cr_lo = 133.0;
  double cr_hi = 173.0;
  double cb_lo = 77.0;
  double cb_hi = 127.0;

  void validate() const;
  bool operator==(const SkinBounds&) const = default;
};

BoolMatrix skin_mask(const Matrix& cr, const Matrix& cb, const SkinBounds& bounds = {});

}  // namespace facever
