// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/error.hpp"
#include "facever/eval.hpp"
#include "facever/model_io.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cstring>
#include <limits>

using namespace facever;

namespace {

std::vector<Verdict> verdicts(int genuine, int rejected, int impostor, int accepted) {
  std::vector<Verdict> v;
  for (int i = 0; i < genuine; ++i) v.push_back({true, i >= rejected});
  for (int i = 0; i < impostor; ++i) v.push_back({false, i < accepted});
  return v;
}

LoadedDataset without_roles(const LoadedDataset& data, std::initializer_list<Role> drop) {
  std::vector<Role> keep;
  for (Role r : kAllRoles)
    if (std::find(drop.begin(), drop.end(), r) == drop.end()) keep.push_back(r);
  LoadedDataset out;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (std::find(keep.begin(), keep.end(), data.manifest.records[i].role) != keep.end()) {
      out.manifest.records.push_back(data.manifest.records[i]);
      out.samples.push_back(data.samples[i]);
    }
  return out;
}

std::vector<double> color_only(const std::vector<ScorePair>& pairs) {
  std::vector<double> out;
  for (const ScorePair& p : pairs) out.push_back(p.color);
  return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("training yields one template per client") {
  const LoadedDataset data = fixture::small_dataset();
  const TrainResult r = train_model(data, RunConfig{});
  CHECK(r.model.templates.size() == 6);
  CHECK(r.model.color_refs.size() == 6);
  CHECK(r.diagnostics.size() == 6);
  CHECK(!r.model.calibrated);
  CHECK(r.model.provenance.train_digest.size() == 64);
  for (const auto& [id, t] : r.model.templates) {
    CHECK(t.q() == 1);
    CHECK(t.d() == 1);
  }
}

TEST_CASE("training ignores evaluation and test rows") {
  const LoadedDataset data = fixture::small_dataset();
  const Model full = train_model(data, RunConfig{}).model;
  const Model trimmed =
      train_model(without_roles(data, {Role::kClientTest, Role::kImpostorTest, Role::kClientEval,
                                       Role::kImpostorEval}),
                  RunConfig{})
          .model;
  CHECK(serialize_model(full) == serialize_model(trimmed));
}

TEST_CASE("deleting test rows changes no model byte and no threshold") {
  for (ThresholdMode mode : {ThresholdMode::kGlobal, ThresholdMode::kPerClient}) {
    RunConfig cfg;
    cfg.threshold_mode = mode;
    const LoadedDataset data = fixture::small_dataset();
    const LoadedDataset no_test = without_roles(data, {Role::kClientTest, Role::kImpostorTest});
    Model a = train_model(data, cfg).model;
    calibrate_model(a, data);
    Model b = train_model(no_test, cfg).model;
    calibrate_model(b, no_test);
    CHECK(serialize_model(a) == serialize_model(b));
  }
}

TEST_CASE("calibration is idempotent") {
  const LoadedDataset data = fixture::small_dataset();
  Model m = train_model(data, RunConfig{}).model;
  const CalibrationSummary first = calibrate_model(m, data);
  const std::string once = serialize_model(m);
  const CalibrationSummary second = calibrate_model(m, data);
  CHECK(serialize_model(m) == once);
  CHECK(first.threshold == second.threshold);
  CHECK(first.genuine_trials == 18);
  CHECK(first.impostor_trials == 2 * 3 * 6);
  CHECK(std::abs(first.far - first.frr) <= 1.0 / 18.0 + 1e-12);
}

TEST_CASE("calibration needs evaluation roles") {
  const LoadedDataset data = fixture::small_dataset();
  Model m = train_model(data, RunConfig{}).model;
  const LoadedDataset no_eval = without_roles(data, {Role::kImpostorEval});
  CHECK_THROWS_AS(calibrate_model(m, no_eval), Error);
}

TEST_CASE("boundary thresholds") {
  const LoadedDataset data = fixture::small_dataset();
  Model m = train_model(data, RunConfig{}).model;
  calibrate_model(m, data);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const std::string& claim = "c00" + std::to_string(i % 6);
    CHECK(!verify(m, claim, data.samples[i], inf).accept);
    CHECK(verify(m, claim, data.samples[i], -inf).accept);
  }
}

TEST_CASE("verification on separable data") {
  SynthParams p = fixture::small_params(11);
  p.grey_separation = 12.0;
  const LoadedDataset data = fixture::load(p);
  Model m = train_model(data, RunConfig{}).model;
  calibrate_model(m, data);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const ManifestRecord& r = data.manifest.records[i];
    if (r.role != Role::kClientTrain) continue;
    CHECK(verify(m, r.subject_id, data.samples[i]).accept);
    const std::string other = r.subject_id == "c000" ? "c001" : "c000";
    CHECK(!verify(m, other, data.samples[i]).accept);
  }
}

TEST_CASE("unknown claims are reported") {
  const LoadedDataset data = fixture::small_dataset();
  const Model m = train_model(data, RunConfig{}).model;
  try {
    verify(m, "stranger", data.samples[0]);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownClient);
  }
  FaceSample wrong = data.samples[0];
  wrong.grey = Matrix::Zero(10, 10);
  CHECK_THROWS_AS(verify(m, "c000", wrong), Error);
}

TEST_CASE("a single training client is rejected") {
  const LoadedDataset data = fixture::small_dataset();
  LoadedDataset one;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (data.manifest.records[i].subject_id == "c000") {
      one.manifest.records.push_back(data.manifest.records[i]);
      one.samples.push_back(data.samples[i]);
    }
  CHECK_THROWS_AS(train_model(one, RunConfig{}), Error);
}

TEST_CASE("colour carries no signal without chroma separation") {
  SynthParams p = fixture::small_params(13);
  p.n_clients = 10;
  p.chroma_separation = 0.0;
  const LoadedDataset data = fixture::load(p);
  const Model m = train_model(data, RunConfig{}).model;
  const ClaimScores s = score_claims(m, data, Role::kClientEval, Role::kImpostorEval);
  const EerPoint e = calibrate_eer(color_only(s.genuine), color_only(s.impostor));
  CHECK(e.eer() >= 0.3);
}

}

TEST_SUITE("eval") {

TEST_CASE("rate examples") {
  const Rates perfect = compute_rates(verdicts(10, 0, 10, 0));
  CHECK(perfect.far == 0.0);
  CHECK(perfect.frr == 0.0);
  CHECK(perfect.ter == 0.0);
  const Rates worst = compute_rates(verdicts(10, 10, 10, 10));
  CHECK(worst.far == 100.0);
  CHECK(worst.frr == 100.0);
  CHECK(worst.ter == 200.0);
  const Rates mixed = compute_rates(verdicts(20, 1, 5, 1));
  CHECK(mixed.far == doctest::Approx(20.0));
  CHECK(mixed.frr == doctest::Approx(5.0));
  CHECK(mixed.ter == doctest::Approx(25.0));
  CHECK_THROWS_AS(compute_rates(verdicts(0, 0, 3, 0)), Error);
}

TEST_CASE("report layout") {
  EvalReport report;
  MethodResult r;
  r.method = Method::k2D2GC;
  r.rates = {1.5, 2.25, 3.75};
  r.verify_us = 12.0;
  r.train_ms = 340.5;
  report.rows.push_back(r);
  MethodResult failed;
  failed.method = Method::kCsf;
  failed.config = ProtocolConfig::kII;
  failed.error = "boom";
  report.rows.push_back(failed);
  CHECK(report.to_csv() ==
        "method,config,far,frr,ter,verify_us,train_ms\n"
        "2D2GC,I,1.5,2.25,3.75,12,340.5\n"
        "CSF,II,,,,,\n");
  CHECK(report.to_text().find("boom") != std::string::npos);
  CHECK(format_number(0.1) == "0.1");
  for (Method m : kAllMethods) CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("LDA"), Error);
}

TEST_CASE("every method separates well-separated data") {
  SynthParams p = fixture::small_params(17);
  p.grey_separation = 12.0;
  const LoadedDataset data = fixture::load(p);
  EvalOptions opt;
  opt.measure_timing = false;
  const EvalReport report = run_comparison(data, ProtocolConfig::kI, kAllMethods, RunConfig{}, opt);
  REQUIRE(report.rows.size() == 3);
  for (const MethodResult& r : report.rows) {
    INFO(to_string(r.method), " ", r.error);
    CHECK(r.ok());
    CHECK(r.rates.ter <= 10.0);
    CHECK(r.rates.ter == doctest::Approx(r.rates.far + r.rates.frr).epsilon(1e-9));
    CHECK(r.verify_us == 0.0);
    CHECK(r.genuine_trials == 18);
    CHECK(r.impostor_trials == 2 * 3 * 6);
  }
}

TEST_CASE("reports are deterministic") {
  const LoadedDataset data = fixture::small_dataset(19);
  EvalOptions opt;
  opt.measure_timing = false;
  const std::string a = run_comparison(data, ProtocolConfig::kI, kAllMethods, RunConfig{}, opt).to_csv();
  const std::string b = run_comparison(data, ProtocolConfig::kI, kAllMethods, RunConfig{}, opt).to_csv();
  CHECK(a == b);
}

TEST_CASE("synthetic data is deterministic per seed") {
  const SyntheticDataset a = synth_generate(fixture::small_params(29));
  const SyntheticDataset b = synth_generate(fixture::small_params(29));
  const SyntheticDataset c = synth_generate(fixture::small_params(30));
  REQUIRE(a.images.size() == b.images.size());
  for (std::size_t i = 0; i < a.images.size(); ++i) CHECK(a.images[i].pixels == b.images[i].pixels);
  CHECK(records_digest(a.manifest.records) == records_digest(b.manifest.records));
  CHECK(a.images[0].pixels != c.images[0].pixels);
  SynthParams bad = fixture::small_params();
  bad.n_clients = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

}
