// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/model.hpp"

#include "facever/error.hpp"
#include "parallel.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <set>

namespace facever {

namespace {

DecisionPolicy initial_policy(FusionMode mode) {
  DecisionPolicy p;
  p.mode = mode;
  p.fusion_weight = mode == FusionMode::kGreyOnly ? 1.0 : mode == FusionMode::kColorOnly ? 0.0 : 0.5;
  return p;
}

GaussianSummary pooled_gaussian(std::span<const ColorFeature> features) {
  // Combine per-sample moments; each sample contributes its masked pixels.
  double n = 0.0, sum = 0.0, sumsq = 0.0;
  for (const ColorFeature& f : features) {
    const auto k = static_cast<double>(f.histogram.pixel_count);
    n += k;
    sum += k * f.gaussian.mean;
    sumsq += k * (f.gaussian.std * f.gaussian.std + f.gaussian.mean * f.gaussian.mean);
  }
  if (n == 0.0) return {};
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sumsq / n - mean * mean))};
}

}  // namespace

const DecisionPolicy& Model::policy_for(const std::string& client_id) const {
  if (config.threshold_mode == ThresholdMode::kPerClient) {
    const auto it = policies.find(client_id);
    if (it != policies.end()) return it->second;
  }
  return global_policy;
}

TrainResult train_model(const LoadedDataset& data, const RunConfig& config, bool with_color) {
  config.validate();
  const ProtocolPartition part = partition(data.manifest, ProtocolConfig::kI);
  require_role(part, Role::kClientTrain);

  const LoadedDataset train = select_roles(data, {Role::kClientTrain});
  std::vector<Matrix> images;
  std::vector<std::string> labels;
  images.reserve(train.samples.size());
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    const FaceSample& s = train.samples[i];
    if (s.grey.rows() != config.geometry.rows || s.grey.cols() != config.geometry.cols)
      throw Error(ErrorKind::kShapeMismatch, "sample '" + train.manifest.records[i].path +
                                                 "' does not match the configured geometry");
    images.push_back(s.grey);
    labels.push_back(train.manifest.records[i].subject_id);
  }
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw Error(ErrorKind::kBadManifest, "training needs at least two clients");

  TrainResult result;
  Model& model = result.model;
  model.config = config;
  model.stage = fit_pca_stage(images, config.pca);
  spdlog::debug("PCA stage: g={} h={}", model.stage.g(), model.stage.h());

  const DiscriminantTrainer trainer(model.stage, images, labels);
  const std::vector<std::string> clients = trainer.clients();
  TemplateOptions topts = config.discriminant;
  topts.q = std::min<int>(topts.q, static_cast<int>(model.stage.h()));
  topts.d = std::min<int>(topts.d, static_cast<int>(model.stage.g()));

  std::vector<ClientTemplate> templates(clients.size());
  result.diagnostics.resize(clients.size());
  detail::parallel_for(clients.size(), config.threads, [&](std::size_t i) {
    templates[i] = trainer.build(clients[i], topts);
    ClientDiagnostics& d = result.diagnostics[i];
    d.client_id = clients[i];
    d.nonsingularity = nonsingularity_check(trainer.scatters(clients[i]));
    int padded = 0;
    for (Eigen::Index k = 0; k < templates[i].col_values.size(); ++k)
      if (templates[i].col_values(k) <= 1e-10) ++padded;
    for (Eigen::Index k = 0; k < templates[i].row_values.size(); ++k)
      if (templates[i].row_values(k) <= 1e-10) ++padded;
    d.padded_directions = padded;
  });
  for (std::size_t i = 0; i < clients.size(); ++i) {
    if (result.diagnostics[i].padded_directions > 0)
      spdlog::warn("client '{}': {} discriminant directions carry a near-zero eigenvalue",
                   clients[i], result.diagnostics[i].padded_directions);
    model.templates.emplace(clients[i], std::move(templates[i]));
  }

  model.global_policy = initial_policy(with_color ? config.fusion_mode : FusionMode::kGreyOnly);
  for (const std::string& c : clients) model.policies.emplace(c, model.global_policy);

  if (with_color) {
    std::vector<ColorFeature> features(train.samples.size());
    detail::parallel_for(features.size(), config.threads, [&](std::size_t i) {
      features[i] = extract_color_feature(train.samples[i], config.skin, config.histogram);
    });
    std::map<std::string, std::vector<std::size_t>> by_client;
    for (std::size_t i = 0; i < labels.size(); ++i) by_client[labels[i]].push_back(i);

    for (std::size_t ci = 0; ci < clients.size(); ++ci) {
      const std::string& c = clients[ci];
      std::vector<ChromaHistogram> own, others;
      std::vector<ColorFeature> own_features;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == c) {
          own.push_back(features[i].histogram);
          own_features.push_back(features[i]);
          if (features[i].used_fallback) ++result.diagnostics[ci].skin_fallbacks;
        } else {
          others.push_back(features[i].histogram);
        }
      }
      ColorReference ref;
      ref.client = mean_histogram(own);
      ref.impostor = mean_histogram(others);
      ref.client_gaussian = pooled_gaussian(own_features);
      model.color_refs.emplace(c, std::move(ref));
    }
  }

  model.provenance.train_digest = records_digest(train.manifest.records);
  model.provenance.seed = config.seed;
  return result;
}

ScorePair score_claim(const Model& model, const std::string& claim, const FaceSample& probe,
                      const ChromaHistogram* probe_hist) {
  const auto it = model.templates.find(claim);
  if (it == model.templates.end())
    throw Error(ErrorKind::kUnknownClient, "client '" + claim + "' is not enrolled in the model");
  const ClientTemplate& t = it->second;
  if (probe.grey.rows() != t.z.cols() || probe.grey.cols() != t.x.rows())
    throw Error(ErrorKind::kShapeMismatch, "probe does not match the model geometry");

  ScorePair pair;
  pair.grey = grey_score(t.project(probe.grey), t.m_c, t.m_i);
  if (model.has_color()) {
    const ColorReference& ref = model.color_refs.at(claim);
    if (probe_hist) {
      pair.color = color_score(*probe_hist, ref.client, ref.impostor);
    } else {
      const ColorFeature f = extract_color_feature(probe, model.config.skin, model.config.histogram);
      pair.color = color_score(f.histogram, ref.client, ref.impostor);
    }
  }
  return pair;
}

ScorePair score_claim(const Model& model, const std::string& claim, const FaceSample& probe) {
  return score_claim(model, claim, probe, nullptr);
}

VerifyResult verify(const Model& model, const std::string& claim, const FaceSample& probe,
                    std::optional<double> threshold_override) {
  VerifyResult r;
  r.raw = score_claim(model, claim, probe);
  const DecisionPolicy& policy = model.policy_for(claim);
  r.fused = fused_score(r.raw, policy);
  r.threshold = threshold_override.value_or(policy.threshold);
  r.accept = accepts(r.fused, r.threshold);
  return r;
}

ClaimScores score_claims(const Model& model, const LoadedDataset& data, Role client_role,
                         Role impostor_role) {
  ClaimScores out;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const ManifestRecord& rec = data.manifest.records[i];
    if (rec.role == client_role) {
      out.genuine.push_back(score_claim(model, rec.subject_id, data.samples[i]));
      out.genuine_claims.push_back(rec.subject_id);
    } else if (rec.role == impostor_role) {
      std::optional<ChromaHistogram> hist;
      if (model.has_color())
        hist = extract_color_feature(data.samples[i], model.config.skin, model.config.histogram).histogram;
      for (const auto& [client, tmpl] : model.templates) {
        out.impostor.push_back(score_claim(model, client, data.samples[i], hist ? &*hist : nullptr));
        out.impostor_claims.push_back(client);
      }
    }
  }
  return out;
}

CalibrationSummary calibrate_model(Model& model, const LoadedDataset& data) {
  const ProtocolPartition part = partition(data.manifest, ProtocolConfig::kI);
  require_role(part, Role::kClientEval);
  require_role(part, Role::kImpostorEval);
  for (const auto& [client, idx] : part.client_eval)
    if (!model.has_client(client))
      throw Error(ErrorKind::kUnknownClient,
                  "evaluation client '" + client + "' is not enrolled in the model");

  const ClaimScores scores = score_claims(model, data, Role::kClientEval, Role::kImpostorEval);

  std::vector<double> grey_all, color_all;
  for (const auto* set : {&scores.genuine, &scores.impostor})
    for (const ScorePair& p : *set) {
      grey_all.push_back(p.grey);
      color_all.push_back(p.color);
    }
  const FusionMode mode = model.has_color() ? model.config.fusion_mode : FusionMode::kGreyOnly;
  DecisionPolicy policy = initial_policy(mode);
  policy.grey_stats = estimate_stats(grey_all);
  policy.color_stats = estimate_stats(color_all);
  if (!(policy.grey_stats.std > 0.0) || !(policy.color_stats.std > 0.0 || mode == FusionMode::kGreyOnly))
    spdlog::warn("evaluation scores have zero spread; normalization disabled for that channel");

  if (mode == FusionMode::kFused) {
    const FusionChoice choice = choose_fusion_weight(scores.genuine, scores.impostor, policy.grey_stats,
                                                     policy.color_stats, model.config.fusion_step);
    policy.fusion_weight = choice.weight;
  }

  auto fused_all = [&](const std::vector<ScorePair>& pairs, const DecisionPolicy& p) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const ScorePair& s : pairs) out.push_back(fused_score(s, p));
    return out;
  };
  const std::vector<double> gen = fused_all(scores.genuine, policy);
  const std::vector<double> imp = fused_all(scores.impostor, policy);
  const EerPoint point = calibrate_eer(gen, imp);
  policy.threshold = point.threshold;
  model.global_policy = policy;

  for (auto& [client, client_policy] : model.policies) {
    client_policy = policy;
    if (model.config.threshold_mode != ThresholdMode::kPerClient) continue;
    std::vector<double> g, im;
    for (std::size_t i = 0; i < gen.size(); ++i)
      if (scores.genuine_claims[i] == client) g.push_back(gen[i]);
    for (std::size_t i = 0; i < imp.size(); ++i)
      if (scores.impostor_claims[i] == client) im.push_back(imp[i]);
    if (g.empty() || im.empty()) {
      spdlog::warn("client '{}' has no evaluation claims of one kind; using the global threshold", client);
      continue;
    }
    client_policy.threshold = calibrate_eer(g, im).threshold;
  }

  model.calibrated = true;
  model.provenance.calibration_digest = records_digest(
      select_roles(data, {Role::kClientEval, Role::kImpostorEval}).manifest.records);

  CalibrationSummary summary;
  summary.threshold = point.threshold;
  summary.fusion_weight = policy.fusion_weight;
  summary.far = point.far;
  summary.frr = point.frr;
  summary.genuine_trials = gen.size();
  summary.impostor_trials = imp.size();
  return summary;
}

}  // namespace facever
