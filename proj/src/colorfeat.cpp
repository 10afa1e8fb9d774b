// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/colorfeat.hpp"

#include "facever/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace facever {

namespace {

void check_same_shape(const Matrix& plane, const BoolMatrix& mask) {
  if (plane.rows() != mask.rows() || plane.cols() != mask.cols())
    throw Error(ErrorKind::kShapeMismatch, "plane and mask differ in shape");
}

}  // namespace

void HistogramSpec::validate() const {
  if (bins < 2) throw Error(ErrorKind::kBadConfig, "histogram needs at least 2 bins");
  if (!(lo < hi)) throw Error(ErrorKind::kBadConfig, "histogram range must satisfy lo < hi");
}

Matrix opponent_chroma(const FaceSample& sample) {
  if (sample.cr.rows() != sample.cb.rows() || sample.cr.cols() != sample.cb.cols())
    throw Error(ErrorKind::kShapeMismatch, "chroma planes differ in shape");
  return sample.cr - sample.cb;
}

ChromaHistogram chroma_histogram(const Matrix& plane, const BoolMatrix& mask,
                                 const HistogramSpec& spec) {
  spec.validate();
  check_same_shape(plane, mask);
  ChromaHistogram hist;
  hist.spec = spec;
  hist.weights.assign(static_cast<std::size_t>(spec.bins), 0.0);
  const double scale = spec.bins / (spec.hi - spec.lo);
  for (Eigen::Index c = 0; c < plane.cols(); ++c) {
    for (Eigen::Index r = 0; r < plane.rows(); ++r) {
      if (!mask(r, c)) continue;
      const double pos = std::floor((plane(r, c) - spec.lo) * scale);
      const int bin = static_cast<int>(std::clamp(pos, 0.0, spec.bins - 1.0));
      hist.weights[static_cast<std::size_t>(bin)] += 1.0;
      ++hist.pixel_count;
    }
  }
  if (hist.pixel_count == 0)
    throw Error(ErrorKind::kEmptyFeature, "mask selects no pixels; histogram is empty");
  for (double& w : hist.weights) w /= static_cast<double>(hist.pixel_count);
  return hist;
}

GaussianSummary fit_gaussian(const Matrix& plane, const BoolMatrix& mask) {
  check_same_shape(plane, mask);
  long count = 0;
  double sum = 0.0;
  for (Eigen::Index c = 0; c < plane.cols(); ++c)
    for (Eigen::Index r = 0; r < plane.rows(); ++r)
      if (mask(r, c)) {
        sum += plane(r, c);
        ++count;
      }
  if (count == 0) throw Error(ErrorKind::kEmptyFeature, "mask selects no pixels; cannot fit Gaussian");
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (Eigen::Index c = 0; c < plane.cols(); ++c)
    for (Eigen::Index r = 0; r < plane.rows(); ++r)
      if (mask(r, c)) ss += (plane(r, c) - mean) * (plane(r, c) - mean);
  return {mean, std::sqrt(ss / static_cast<double>(count))};
}

double histogram_distance(const ChromaHistogram& a, const ChromaHistogram& b) {
  if (!(a.spec == b.spec) || a.weights.size() != b.weights.size())
    throw Error(ErrorKind::kShapeMismatch, "histograms use different binning");
  double bc = 0.0;
  for (std::size_t k = 0; k < a.weights.size(); ++k) bc += std::sqrt(a.weights[k] * b.weights[k]);
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

ChromaHistogram mean_histogram(std::span<const ChromaHistogram> hists) {
  if (hists.empty()) throw Error(ErrorKind::kEmptyFeature, "no histograms to average");
  ChromaHistogram out;
  out.spec = hists.front().spec;
  out.weights.assign(hists.front().weights.size(), 0.0);
  for (const ChromaHistogram& h : hists) {
    if (!(h.spec == out.spec) || h.weights.size() != out.weights.size())
      throw Error(ErrorKind::kShapeMismatch, "histograms use different binning");
    for (std::size_t k = 0; k < h.weights.size(); ++k) out.weights[k] += h.weights[k];
    out.pixel_count += h.pixel_count;
  }
  double total = 0.0;
  for (double w : out.weights) total += w;
  if (total > 0.0)
    for (double& w : out.weights) w /= total;
  return out;
}

ColorFeature extract_color_feature(const FaceSample& sample, const SkinBounds& skin,
                                   const HistogramSpec& spec) {
  const Matrix plane = opponent_chroma(sample);
  BoolMatrix mask = skin_mask(sample.cr, sample.cb, skin);
  ColorFeature f;
  if (!mask.any()) {
    spdlog::warn("empty skin mask for subject '{}' session {}; using the whole crop",
                 sample.subject_id, sample.session);
    mask = BoolMatrix::Constant(plane.rows(), plane.cols(), true);
    f.used_fallback = true;
  }
  f.histogram = chroma_histogram(plane, mask, spec);
  f.gaussian = fit_gaussian(plane, mask);
  return f;
}

}  // namespace facever
