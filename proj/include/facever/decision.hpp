// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/colorfeat.hpp"
#include "facever/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace facever {

/// Scores from the two experts for one claim. Larger is more client-like.
struct ScorePair {
  double grey = 0.0;
  double color = 0.0;
};

enum class FusionMode { kGreyOnly, kColorOnly, kFused };

const char* to_string(FusionMode mode);
FusionMode fusion_mode_from_string(const std::string& text);

/// Location/scale used for z-normalization, estimated on evaluation data.
struct ScoreStats {
  double mean = 0.0;
  double std = 1.0;
  bool operator==(const ScoreStats&) const = default;
};

struct DecisionPolicy {
  double threshold = 0.0;
  double fusion_weight = 0.5;  // weight on the grey score
  FusionMode mode = FusionMode::kFused;
  ScoreStats grey_stats;
  ScoreStats color_stats;

  void validate() const;
  bool operator==(const DecisionPolicy&) const = default;
};

/// D = ||y - m_i||_F - ||y - m_c||_F.
double grey_score(const Matrix& y, const Matrix& m_c, const Matrix& m_i);

/// distance(probe, impostor ref) - distance(probe, client ref).
double color_score(const ChromaHistogram& probe, const ChromaHistogram& ref_client,
                   const ChromaHistogram& ref_impostor);

/// Population mean and standard deviation of a score list.
ScoreStats estimate_stats(std::span<const double> scores);

double normalize_score(double score, const ScoreStats& stats);
std::vector<double> normalize_scores(std::span<const double> scores, const ScoreStats& stats);

/// Combines already-normalized expert scores according to the policy mode.
double fuse(const ScorePair& normalized, const DecisionPolicy& policy);

/// Normalizes a raw pair with the policy's statistics, then fuses.
double fused_score(const ScorePair& raw, const DecisionPolicy& policy);

/// Accept iff score > threshold.
inline bool accepts(double score, double threshold) { return score > threshold; }

struct EerPoint {
  double threshold = 0.0;
  double far = 0.0;  // fraction of impostor scores > threshold
  double frr = 0.0;  // fraction of genuine scores <= threshold

  double eer() const { return 0.5 * (far + frr); }
};

/// Threshold at the equal error rate. Candidates are the midpoints between
/// consecutive distinct scores plus one point below all scores and one at the
/// maximum, so every achievable (FAR, FRR) pair is considered. Selection:
/// smallest |FAR - FRR|, then smallest FAR + FRR, then smallest threshold.
EerPoint calibrate_eer(std::span<const double> genuine, std::span<const double> impostor);

/// (FAR, FRR) fractions at a fixed threshold.
EerPoint rates_at(std::span<const double> genuine, std::span<const double> impostor,
                  double threshold);

struct FusionChoice {
  double weight = 1.0;
  EerPoint point;
};

/// Grid search of the grey weight over {0, step, ..., 1} minimizing the EER of
/// the fused normalized scores. Ties go to the larger d-prime
/// (mean gap over pooled standard deviation), then to the earlier grid point.
FusionChoice choose_fusion_weight(std::span<const ScorePair> genuine,
                                  std::span<const ScorePair> impostor, const ScoreStats& grey,
                                  const ScoreStats& color, double step = 0.05);

}  // namespace facever
