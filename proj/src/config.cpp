// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/config.hpp"

#include "facever/error.hpp"

#include <fstream>
#include <array>
#include <set>

namespace facever {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "rows",       "cols",      "left_eye",     "right_eye", "g",           "h",
      "energy",     "q",         "d",            "ridge",     "hist_bins",   "hist_lo",
      "hist_hi",    "skin_cr",   "skin_cb",      "fusion_mode", "fusion_step", "threshold_mode",
      "csf_energy", "seed",      "threads"};
  return keys;
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBadConfig, std::string("config key '") + key + "': " + e.what());
  }
}

std::array<double, 2> get_pair(const json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  if (v.size() != 2)
    throw Error(ErrorKind::kBadConfig, std::string("config key '") + key + "' needs two numbers");
  return {v[0], v[1]};
}

}  // namespace

const char* to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kGlobal ? "global" : "per_client";
}

ThresholdMode threshold_mode_from_string(const std::string& text) {
  if (text == "global") return ThresholdMode::kGlobal;
  if (text == "per_client" || text == "per-client") return ThresholdMode::kPerClient;
  throw Error(ErrorKind::kBadConfig, "unknown threshold mode '" + text + "'");
}

void RunConfig::validate() const {
  geometry.validate();
  histogram.validate();
  skin.validate();
  if (pca.g < 0 || pca.h < 0) throw Error(ErrorKind::kBadConfig, "g and h must be >= 0 (0 = automatic)");
  if (pca.g > geometry.cols || pca.h > geometry.rows)
    throw Error(ErrorKind::kBadConfig, "g must not exceed cols and h must not exceed rows");
  if (!(pca.energy > 0.0 && pca.energy <= 1.0) || !(csf_energy > 0.0 && csf_energy <= 1.0))
    throw Error(ErrorKind::kBadConfig, "energy fractions must lie in (0, 1]");
  if (discriminant.q < 1 || discriminant.d < 1)
    throw Error(ErrorKind::kBadConfig, "q and d must be >= 1");
  if (!(discriminant.ridge >= 0.0)) throw Error(ErrorKind::kBadConfig, "ridge must be >= 0");
  if (!(fusion_step > 0.0 && fusion_step <= 1.0))
    throw Error(ErrorKind::kBadConfig, "fusion_step must lie in (0, 1]");
  if (threads < 1) throw Error(ErrorKind::kBadConfig, "threads must be >= 1");
}

json to_json(const RunConfig& c) {
  return json{
      {"rows", c.geometry.rows},
      {"cols", c.geometry.cols},
      {"left_eye", {c.geometry.left_eye_target.row, c.geometry.left_eye_target.col}},
      {"right_eye", {c.geometry.right_eye_target.row, c.geometry.right_eye_target.col}},
      {"g", c.pca.g},
      {"h", c.pca.h},
      {"energy", c.pca.energy},
      {"q", c.discriminant.q},
      {"d", c.discriminant.d},
      {"ridge", c.discriminant.ridge},
      {"hist_bins", c.histogram.bins},
      {"hist_lo", c.histogram.lo},
      {"hist_hi", c.histogram.hi},
      {"skin_cr", {c.skin.cr_lo, c.skin.cr_hi}},
      {"skin_cb", {c.skin.cb_lo, c.skin.cb_hi}},
      {"fusion_mode", to_string(c.fusion_mode)},
      {"fusion_step", c.fusion_step},
      {"threshold_mode", to_string(c.threshold_mode)},
      {"csf_energy", c.csf_energy},
      {"seed", c.seed},
  };
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::kBadConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_keys().count(key)) throw Error(ErrorKind::kBadConfig, "unknown config key '" + key + "'");

  if (j.contains("rows")) c.geometry.rows = get<int>(j, "rows");
  if (j.contains("cols")) c.geometry.cols = get<int>(j, "cols");
  if (j.contains("left_eye")) {
    const auto p = get_pair(j, "left_eye");
    c.geometry.left_eye_target = {p[0], p[1]};
  }
  if (j.contains("right_eye")) {
    const auto p = get_pair(j, "right_eye");
    c.geometry.right_eye_target = {p[0], p[1]};
  }
  if (j.contains("g")) c.pca.g = get<int>(j, "g");
  if (j.contains("h")) c.pca.h = get<int>(j, "h");
  if (j.contains("energy")) c.pca.energy = get<double>(j, "energy");
  if (j.contains("q")) c.discriminant.q = get<int>(j, "q");
  if (j.contains("d")) c.discriminant.d = get<int>(j, "d");
  if (j.contains("ridge")) c.discriminant.ridge = get<double>(j, "ridge");
  if (j.contains("hist_bins")) c.histogram.bins = get<int>(j, "hist_bins");
  if (j.contains("hist_lo")) c.histogram.lo = get<double>(j, "hist_lo");
  if (j.contains("hist_hi")) c.histogram.hi = get<double>(j, "hist_hi");
  if (j.contains("skin_cr")) {
    const auto p = get_pair(j, "skin_cr");
    c.skin.cr_lo = p[0];
    c.skin.cr_hi = p[1];
  }
  if (j.contains("skin_cb")) {
    const auto p = get_pair(j, "skin_cb");
    c.skin.cb_lo = p[0];
    c.skin.cb_hi = p[1];
  }
  if (j.contains("fusion_mode")) c.fusion_mode = fusion_mode_from_string(get<std::string>(j, "fusion_mode"));
  if (j.contains("fusion_step")) c.fusion_step = get<double>(j, "fusion_step");
  if (j.contains("threshold_mode"))
    c.threshold_mode = threshold_mode_from_string(get<std::string>(j, "threshold_mode"));
  if (j.contains("csf_energy")) c.csf_energy = get<double>(j, "csf_energy");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("threads")) c.threads = get<int>(j, "threads");
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBadConfig, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace facever
