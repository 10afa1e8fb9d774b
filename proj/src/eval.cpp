// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/eval.hpp"

#include "facever/csf.hpp"
#include "facever/error.hpp"
#include "facever/model.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace facever {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename Fn>
double mean_call_us(const EvalOptions& options, Fn&& fn) {
  if (!options.measure_timing || options.timing_calls < 1) return 0.0;
  volatile double sink = 0.0;
  for (int i = 0; i < options.warmup_calls; ++i) sink = sink + fn();
  const auto start = Clock::now();
  for (int i = 0; i < options.timing_calls; ++i) sink = sink + fn();
  const double total = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
  return total / options.timing_calls;
}

const FaceSample& first_with_role(const LoadedDataset& data, Role role) {
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (data.manifest.records[i].role == role) return data.samples[i];
  throw Error(ErrorKind::kBadManifest, std::string("no records with role ") + to_string(role));
}

void run_grey_model(const LoadedDataset& data, const RunConfig& run, bool with_color,
                    const EvalOptions& options, MethodResult& out) {
  const auto start = Clock::now();
  Model model = train_model(data, run, with_color).model;
  const double train_ms = elapsed_ms(start);
  calibrate_model(model, data);

  const ClaimScores test = score_claims(model, data, Role::kClientTest, Role::kImpostorTest);
  std::vector<Verdict> verdicts;
  for (std::size_t i = 0; i < test.genuine.size(); ++i) {
    const DecisionPolicy& p = model.policy_for(test.genuine_claims[i]);
    verdicts.push_back({true, accepts(fused_score(test.genuine[i], p), p.threshold)});
  }
  for (std::size_t i = 0; i < test.impostor.size(); ++i) {
    const DecisionPolicy& p = model.policy_for(test.impostor_claims[i]);
    verdicts.push_back({false, accepts(fused_score(test.impostor[i], p), p.threshold)});
  }
  out.rates = compute_rates(verdicts);
  out.genuine_trials = test.genuine.size();
  out.impostor_trials = test.impostor.size();

  const FaceSample& probe = first_with_role(data, Role::kClientTest);
  const std::string claim = model.templates.begin()->first;
  out.verify_us = mean_call_us(options, [&] { return verify(model, claim, probe).fused; });
  out.train_ms = options.measure_timing ? train_ms : 0.0;
}

struct CsfScores {
  std::vector<double> genuine, impostor;
  std::vector<std::string> genuine_claims, impostor_claims;
};

CsfScores csf_scores(const CsfModel& model, const LoadedDataset& data, Role client_role,
                     Role impostor_role) {
  CsfScores s;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const ManifestRecord& rec = data.manifest.records[i];
    if (rec.role == client_role) {
      const auto it = model.clients.find(rec.subject_id);
      if (it == model.clients.end())
        throw Error(ErrorKind::kUnknownClient, "client '" + rec.subject_id + "' has no training samples");
      s.genuine.push_back(it->second.score(data.samples[i].grey));
      s.genuine_claims.push_back(rec.subject_id);
    } else if (rec.role == impostor_role) {
      for (const auto& [id, c] : model.clients) {
        s.impostor.push_back(c.score(data.samples[i].grey));
        s.impostor_claims.push_back(id);
      }
    }
  }
  return s;
}

void run_csf(const LoadedDataset& data, const RunConfig& run, const EvalOptions& options,
             MethodResult& out) {
  const auto start = Clock::now();
  const LoadedDataset train = select_roles(data, {Role::kClientTrain});
  std::vector<Matrix> images;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    images.push_back(train.samples[i].grey);
    labels.push_back(train.manifest.records[i].subject_id);
  }
  const CsfModel model = train_csf(images, labels, run.csf_energy, run.discriminant.ridge, run.threads);
  const double train_ms = elapsed_ms(start);

  const CsfScores eval = csf_scores(model, data, Role::kClientEval, Role::kImpostorEval);
  const double global = calibrate_eer(eval.genuine, eval.impostor).threshold;
  std::map<std::string, double> thresholds;
  for (const auto& [id, c] : model.clients) {
    thresholds[id] = global;
    if (run.threshold_mode != ThresholdMode::kPerClient) continue;
    std::vector<double> g, im;
    for (std::size_t i = 0; i < eval.genuine.size(); ++i)
      if (eval.genuine_claims[i] == id) g.push_back(eval.genuine[i]);
    for (std::size_t i = 0; i < eval.impostor.size(); ++i)
      if (eval.impostor_claims[i] == id) im.push_back(eval.impostor[i]);
    if (!g.empty() && !im.empty()) thresholds[id] = calibrate_eer(g, im).threshold;
  }

  const CsfScores test = csf_scores(model, data, Role::kClientTest, Role::kImpostorTest);
  std::vector<Verdict> verdicts;
  for (std::size_t i = 0; i < test.genuine.size(); ++i)
    verdicts.push_back({true, accepts(test.genuine[i], thresholds.at(test.genuine_claims[i]))});
  for (std::size_t i = 0; i < test.impostor.size(); ++i)
    verdicts.push_back({false, accepts(test.impostor[i], thresholds.at(test.impostor_claims[i]))});
  out.rates = compute_rates(verdicts);
  out.genuine_trials = test.genuine.size();
  out.impostor_trials = test.impostor.size();

  const FaceSample& probe = first_with_role(data, Role::kClientTest);
  const CsfClient& client = model.clients.begin()->second;
  const double t = thresholds.at(client.client_id);
  out.verify_us = mean_call_us(options, [&] {
    const double s = client.score(probe.grey);
    return accepts(s, t) ? s : -s;
  });
  out.train_ms = options.measure_timing ? train_ms : 0.0;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kCsf: return "CSF";
    case Method::k2D2G: return "2D2G";
    case Method::k2D2GC: return "2D2GC";
  }
  return "?";
}

Method method_from_string(const std::string& text) {
  for (Method m : kAllMethods)
    if (text == to_string(m)) return m;
  throw Error(ErrorKind::kInvalidArgument, "unknown method '" + text + "' (expected CSF, 2D2G or 2D2GC)");
}

Rates compute_rates(std::span<const Verdict> verdicts) {
  std::size_t gen = 0, imp = 0, rejected = 0, accepted = 0;
  for (const Verdict& v : verdicts) {
    if (v.genuine) {
      ++gen;
      if (!v.accepted) ++rejected;
    } else {
      ++imp;
      if (v.accepted) ++accepted;
    }
  }
  if (gen == 0 || imp == 0)
    throw Error(ErrorKind::kInvalidArgument, "rates need at least one genuine and one impostor trial");
  Rates r;
  r.far = 100.0 * static_cast<double>(accepted) / static_cast<double>(imp);
  r.frr = 100.0 * static_cast<double>(rejected) / static_cast<double>(gen);
  r.ter = r.far + r.frr;
  return r;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const MethodResult& r : rows) {
    os << to_string(r.method) << ',' << to_string(r.config) << ',';
    if (r.ok())
      os << format_number(r.rates.far) << ',' << format_number(r.rates.frr) << ','
         << format_number(r.rates.ter) << ',' << format_number(r.verify_us) << ','
         << format_number(r.train_ms);
    else
      os << ",,,,";
    os << '\n';
  }
  return os.str();
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-6s %8s %8s %8s %11s %11s\n", "Method", "Config", "FAR(%)",
                "FRR(%)", "TER(%)", "verify(us)", "train(ms)");
  os << line;
  for (const MethodResult& r : rows) {
    if (r.ok()) {
      std::snprintf(line, sizeof line, "%-7s %-6s %8s %8s %8s %11s %11s\n", to_string(r.method),
                    to_string(r.config), fixed(r.rates.far, 2).c_str(), fixed(r.rates.frr, 2).c_str(),
                    fixed(r.rates.ter, 2).c_str(), fixed(r.verify_us, 2).c_str(),
                    fixed(r.train_ms, 1).c_str());
      os << line;
    } else {
      std::snprintf(line, sizeof line, "%-7s %-6s ", to_string(r.method), to_string(r.config));
      os << line << "error: " << r.error << '\n';
    }
  }
  return os.str();
}

EvalReport run_comparison(const LoadedDataset& data, ProtocolConfig config,
                          std::span<const Method> methods, const RunConfig& run,
                          const EvalOptions& options) {
  run.validate();
  const ProtocolPartition part = partition(data.manifest, config);
  for (Role r : kAllRoles) require_role(part, r);

  EvalReport report;
  for (Method m : methods) {
    MethodResult row;
    row.method = m;
    row.config = config;
    try {
      switch (m) {
        case Method::kCsf: run_csf(data, run, options, row); break;
        case Method::k2D2G: run_grey_model(data, run, false, options, row); break;
        case Method::k2D2GC: run_grey_model(data, run, true, options, row); break;
      }
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
      spdlog::error("{} failed: {}", to_string(m), e.what());
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace facever
