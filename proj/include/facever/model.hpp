// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/colorfeat.hpp"
#include "facever/config.hpp"
#include "facever/dataset.hpp"
#include "facever/decision.hpp"
#include "facever/discriminant.hpp"
#include "facever/subspace.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace facever {

inline constexpr int kModelFormatVersion = 1;

struct ColorReference {
  ChromaHistogram client;
  ChromaHistogram impostor;
  GaussianSummary client_gaussian;  // diagnostic only
};

struct Provenance {
  std::string train_digest;        // SHA-256 of the client_train records used
  std::string calibration_digest;  // SHA-256 of the evaluation records used
  std::uint64_t seed = 0;
  std::string created;             // from SOURCE_DATE_EPOCH, "unset" otherwise
};

/// Everything needed to verify claims: the shared PCA stage, one template,
/// colour reference and decision policy per client, and a global policy.
struct Model {
  int format_version = kModelFormatVersion;
  RunConfig config;
  PcaStage stage;
  std::map<std::string, ClientTemplate> templates;
  std::map<std::string, ColorReference> color_refs;
  std::map<std::string, DecisionPolicy> policies;
  DecisionPolicy global_policy;
  bool calibrated = false;
  Provenance provenance;

  bool has_client(const std::string& id) const { return templates.count(id) > 0; }
  bool has_color() const { return !color_refs.empty(); }
  /// Per-client policy in per-client threshold mode, otherwise the global one.
  const DecisionPolicy& policy_for(const std::string& client_id) const;
};

struct ClientDiagnostics {
  std::string client_id;
  NonsingularityDiagnosis nonsingularity;
  int padded_directions = 0;
  int skin_fallbacks = 0;
};

struct TrainResult {
  Model model;
  std::vector<ClientDiagnostics> diagnostics;
};

/// Fits the PCA stage on every client_train sample, then one template (and,
/// with with_color, one colour reference) per client. Other roles in the
/// dataset are ignored.
TrainResult train_model(const LoadedDataset& data, const RunConfig& config, bool with_color = true);

/// Raw expert scores for a claim. The histogram overload reuses a probe
/// feature computed once for many claims.
ScorePair score_claim(const Model& model, const std::string& claim, const FaceSample& probe);
ScorePair score_claim(const Model& model, const std::string& claim, const FaceSample& probe,
                      const ChromaHistogram* probe_hist);

struct VerifyResult {
  bool accept = false;
  double fused = 0.0;
  ScorePair raw;
  double threshold = 0.0;
};

VerifyResult verify(const Model& model, const std::string& claim, const FaceSample& probe,
                    std::optional<double> threshold_override = std::nullopt);

/// Genuine and impostor claims for one role pair, scored against a model.
struct ClaimScores {
  std::vector<ScorePair> genuine;
  std::vector<ScorePair> impostor;
  std::vector<std::string> genuine_claims;
  std::vector<std::string> impostor_claims;
};

/// Scores client_role samples against their own identity and every
/// impostor_role sample against every enrolled client.
ClaimScores score_claims(const Model& model, const LoadedDataset& data, Role client_role,
                         Role impostor_role);

struct CalibrationSummary {
  double threshold = 0.0;
  double fusion_weight = 1.0;
  double far = 0.0;
  double frr = 0.0;
  std::size_t genuine_trials = 0;
  std::size_t impostor_trials = 0;
};

/// Sets normalization statistics, fusion weight and thresholds from the
/// client_eval / impostor_eval records of data.
CalibrationSummary calibrate_model(Model& model, const LoadedDataset& data);

}  // namespace facever
