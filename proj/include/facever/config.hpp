// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/colorfeat.hpp"
#include "facever/decision.hpp"
#include "facever/discriminant.hpp"
#include "facever/imaging.hpp"
#include "facever/subspace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace facever {

enum class ThresholdMode { kGlobal, kPerClient };

const char* to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(const std::string& text);

/// Every tunable of the pipeline. JSON keys mirror the field names; unknown
/// keys are rejected.
struct RunConfig {
  GeometryConfig geometry;
  PcaOptions pca;
  TemplateOptions discriminant;
  HistogramSpec histogram;
  SkinBounds skin;
  FusionMode fusion_mode = FusionMode::kFused;
  double fusion_step = 0.05;
  ThresholdMode threshold_mode = ThresholdMode::kGlobal;
  double csf_energy = 0.95;
  std::uint64_t seed = 1;
  int threads = 1;  // not part of the model record

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Serializes the model-relevant fields (everything except threads).
nlohmann::json to_json(const RunConfig& c);
/// Overlays the keys present in j onto base.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnvVar = "FACEVER_CONFIG";

}  // namespace facever
