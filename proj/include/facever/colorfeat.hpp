// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/imaging.hpp"
#include "facever/linalg.hpp"

#include <span>
#include <vector>

namespace facever {

struct HistogramSpec {
  int bins = 64;
  double lo = -128.0;
  double hi = 128.0;

  void validate() const;
  double bin_center(int k) const { return lo + (k + 0.5) * (hi - lo) / bins; }
  bool operator==(const HistogramSpec&) const = default;
};

struct ChromaHistogram {
  HistogramSpec spec;
  std::vector<double> weights;  // sums to 1 when pixel_count > 0
  long pixel_count = 0;
};

struct GaussianSummary {
  double mean = 0.0;
  double std = 0.0;
};

/// Cr - Cb, elementwise.
Matrix opponent_chroma(const FaceSample& sample);

/// Normalized histogram of the masked-in entries of plane. Values outside
/// [lo, hi) are clamped into the end bins. Throws kEmptyFeature when the mask
/// selects nothing.
ChromaHistogram chroma_histogram(const Matrix& plane, const BoolMatrix& mask,
                                 const HistogramSpec& spec = {});

/// Mean and population standard deviation of the masked-in entries.
GaussianSummary fit_gaussian(const Matrix& plane, const BoolMatrix& mask);

/// Bhattacharyya distance 1 - sum_k sqrt(a_k b_k), clamped to [0, 1].
double histogram_distance(const ChromaHistogram& a, const ChromaHistogram& b);

/// Bin-wise mean of several histograms, renormalized.
ChromaHistogram mean_histogram(std::span<const ChromaHistogram> hists);

/// Colour feature of one face: opponent-chroma histogram over skin pixels.
/// An empty skin mask falls back to the whole crop and sets used_fallback.
struct ColorFeature {
  ChromaHistogram histogram;
  GaussianSummary gaussian;
  bool used_fallback = false;
};

ColorFeature extract_color_feature(const FaceSample& sample, const SkinBounds& skin,
                                   const HistogramSpec& spec);

}  // namespace facever
