// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/decision.hpp"

#include "facever/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace facever {

const char* to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::kGreyOnly: return "grey_only";
    case FusionMode::kColorOnly: return "color_only";
    case FusionMode::kFused: return "fused";
  }
  return "fused";
}

FusionMode fusion_mode_from_string(const std::string& text) {
  if (text == "grey_only") return FusionMode::kGreyOnly;
  if (text == "color_only") return FusionMode::kColorOnly;
  if (text == "fused") return FusionMode::kFused;
  throw Error(ErrorKind::kBadConfig, "unknown fusion mode '" + text + "'");
}

void DecisionPolicy::validate() const {
  if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0))
    throw Error(ErrorKind::kBadConfig, "fusion weight must lie in [0, 1]");
  if (std::isnan(threshold)) throw Error(ErrorKind::kBadConfig, "threshold is NaN");
}

double grey_score(const Matrix& y, const Matrix& m_c, const Matrix& m_i) {
  if (y.rows() != m_c.rows() || y.cols() != m_c.cols() || y.rows() != m_i.rows() ||
      y.cols() != m_i.cols())
    throw Error(ErrorKind::kShapeMismatch, "projected probe and class means differ in shape");
  return (y - m_i).norm() - (y - m_c).norm();
}

double color_score(const ChromaHistogram& probe, const ChromaHistogram& ref_client,
                   const ChromaHistogram& ref_impostor) {
  return histogram_distance(probe, ref_impostor) - histogram_distance(probe, ref_client);
}

ScoreStats estimate_stats(std::span<const double> scores) {
  if (scores.empty()) return {};
  double sum = 0.0;
  for (double s : scores) sum += s;
  const double mean = sum / static_cast<double>(scores.size());
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / static_cast<double>(scores.size()))};
}

double normalize_score(double score, const ScoreStats& stats) {
  if (!(stats.std > 0.0)) return score;
  return (score - stats.mean) / stats.std;
}

std::vector<double> normalize_scores(std::span<const double> scores, const ScoreStats& stats) {
  if (!(stats.std > 0.0))
    spdlog::warn("score standard deviation is {}; scores passed through unnormalized", stats.std);
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(normalize_score(s, stats));
  return out;
}

double fuse(const ScorePair& normalized, const DecisionPolicy& policy) {
  switch (policy.mode) {
    case FusionMode::kGreyOnly: return normalized.grey;
    case FusionMode::kColorOnly: return normalized.color;
    case FusionMode::kFused:
      return policy.fusion_weight * normalized.grey + (1.0 - policy.fusion_weight) * normalized.color;
  }
  return normalized.grey;
}

double fused_score(const ScorePair& raw, const DecisionPolicy& policy) {
  return fuse({normalize_score(raw.grey, policy.grey_stats),
               normalize_score(raw.color, policy.color_stats)},
              policy);
}

namespace {

double separation(std::span<const double> gen, std::span<const double> imp) {
  const ScoreStats g = estimate_stats(gen), i = estimate_stats(imp);
  const double spread = std::sqrt(0.5 * (g.std * g.std + i.std * i.std));
  return spread > 0.0 ? (g.mean - i.mean) / spread : 0.0;
}

struct Counts {
  long false_accepts;  // impostor > t
  long false_rejects;  // genuine <= t
};

}  // namespace

EerPoint rates_at(std::span<const double> genuine, std::span<const double> impostor,
                  double threshold) {
  if (genuine.empty() || impostor.empty())
    throw Error(ErrorKind::kInvalidArgument, "rates need genuine and impostor scores");
  long fa = 0, fr = 0;
  for (double s : impostor)
    if (accepts(s, threshold)) ++fa;
  for (double s : genuine)
    if (!accepts(s, threshold)) ++fr;
  return {threshold, static_cast<double>(fa) / impostor.size(),
          static_cast<double>(fr) / genuine.size()};
}

EerPoint calibrate_eer(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty())
    throw Error(ErrorKind::kInvalidArgument, "EER calibration needs genuine and impostor scores");

  std::vector<double> gen(genuine.begin(), genuine.end());
  std::vector<double> imp(impostor.begin(), impostor.end());
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> all;
  all.reserve(gen.size() + imp.size());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(all));
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> candidates;
  candidates.reserve(all.size() + 1);
  candidates.push_back(std::nextafter(all.front(), -std::numeric_limits<double>::infinity()));
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    candidates.push_back(all[i] + 0.5 * (all[i + 1] - all[i]));
  candidates.push_back(all.back());

  const long ng = static_cast<long>(gen.size());
  const long ni = static_cast<long>(imp.size());
  auto counts_at = [&](double t) {
    const long fr = std::upper_bound(gen.begin(), gen.end(), t) - gen.begin();
    const long fa = ni - (std::upper_bound(imp.begin(), imp.end(), t) - imp.begin());
    return Counts{fa, fr};
  };

  // Rates compared exactly in integers: FAR = fa/ni, FRR = fr/ng.
  double best_t = candidates.front();
  Counts best = counts_at(best_t);
  auto gap = [&](const Counts& c) { return std::labs(c.false_accepts * ng - c.false_rejects * ni); };
  auto total = [&](const Counts& c) { return c.false_accepts * ng + c.false_rejects * ni; };
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const Counts c = counts_at(candidates[i]);
    const long dg = gap(c) - gap(best);
    if (dg < 0 || (dg == 0 && total(c) < total(best))) {
      best = c;
      best_t = candidates[i];
    }
  }
  return {best_t, static_cast<double>(best.false_accepts) / ni,
          static_cast<double>(best.false_rejects) / ng};
}

FusionChoice choose_fusion_weight(std::span<const ScorePair> genuine,
                                  std::span<const ScorePair> impostor, const ScoreStats& grey,
                                  const ScoreStats& color, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorKind::kBadConfig, "fusion grid step must lie in (0, 1]");
  const int points = static_cast<int>(std::lround(1.0 / step));
  DecisionPolicy policy;
  policy.mode = FusionMode::kFused;
  policy.grey_stats = grey;
  policy.color_stats = color;

  FusionChoice best;
  double best_sep = 0.0;
  bool have = false;
  std::vector<double> gen(genuine.size()), imp(impostor.size());
  for (int k = 0; k <= points; ++k) {
    policy.fusion_weight = std::min(1.0, k * step);
    for (std::size_t i = 0; i < genuine.size(); ++i) gen[i] = fused_score(genuine[i], policy);
    for (std::size_t i = 0; i < impostor.size(); ++i) imp[i] = fused_score(impostor[i], policy);
    const EerPoint p = calibrate_eer(gen, imp);
    const double sep = separation(gen, imp);
    if (!have || p.eer() < best.point.eer() || (p.eer() == best.point.eer() && sep > best_sep)) {
      best = {policy.fusion_weight, p};
      best_sep = sep;
      have = true;
    }
  }
  return best;
}

}  // namespace facever
