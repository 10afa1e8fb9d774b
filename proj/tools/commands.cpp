// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include "facever/config.hpp"
#include "facever/dataset.hpp"
#include "facever/eval.hpp"
#include "facever/image_io.hpp"
#include "facever/model.hpp"
#include "facever/model_io.hpp"
#include "facever/synth.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace facever::cli {

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string log_level = "info";
};

struct ConfigOverrides {
  std::optional<int> g, h, q, d;
  std::optional<std::string> fusion_mode, threshold_mode;
};

RunConfig resolve_config(const Common& common, const ConfigOverrides& ov = {}) {
  RunConfig cfg;
  std::string source = "built-in defaults";
  std::string path = common.config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnvVar); env && *env) path = env;
  if (!path.empty()) {
    cfg = load_config(path, cfg);
    source = "config file " + path;
  }
  std::vector<std::string> flags;
  if (common.seed) cfg.seed = *common.seed, flags.push_back("seed");
  if (common.threads) cfg.threads = *common.threads, flags.push_back("threads");
  if (ov.g) cfg.pca.g = *ov.g, flags.push_back("g");
  if (ov.h) cfg.pca.h = *ov.h, flags.push_back("h");
  if (ov.q) cfg.discriminant.q = *ov.q, flags.push_back("q");
  if (ov.d) cfg.discriminant.d = *ov.d, flags.push_back("d");
  if (ov.fusion_mode) {
    try {
      cfg.fusion_mode = fusion_mode_from_string(*ov.fusion_mode);
    } catch (const Error& e) {
      throw Error(ErrorKind::kBadConfig, e.what());
    }
    flags.push_back("fusion_mode");
  }
  if (ov.threshold_mode) {
    cfg.threshold_mode = threshold_mode_from_string(*ov.threshold_mode);
    flags.push_back("threshold_mode");
  }
  cfg.validate();
  std::string joined;
  for (const auto& f : flags) joined += (joined.empty() ? "" : ",") + f;
  spdlog::info("configuration: {} overlaid by flags [{}]: {} threads={}", source, joined,
               to_json(cfg).dump(), cfg.threads);
  return cfg;
}

std::string creation_stamp() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (!epoch || !*epoch) return "unset";
  char* end = nullptr;
  errno = 0;
  const long long secs = std::strtoll(epoch, &end, 10);
  if (errno != 0 || *end != '\0' || secs < 0) return "unset";
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double parse_threshold(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || std::isnan(v))
    throw Error(ErrorKind::kInvalidArgument, "threshold '" + text + "' is not a number");
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
}

LoadedDataset load_manifest_data(const std::string& path, const GeometryConfig& geo) {
  return load_dataset(read_manifest(path), geo);
}

// synth ----------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SynthParams params;
};

int cmd_synth(const Common& common, SynthArgs args) {
  const RunConfig cfg = resolve_config(common);
  args.params.seed = cfg.seed;
  args.params.geometry = cfg.geometry;
  SyntheticDataset data = synth_generate(args.params);
  write_synthetic(data, args.out);
  std::cout << "wrote " << data.images.size() << " images and manifest.csv to " << args.out << "\n";
  return kExitAccept;
}

// train ----------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out;
  bool no_color = false;
  ConfigOverrides overrides;
};

int cmd_train(const Common& common, const TrainArgs& args) {
  const RunConfig cfg = resolve_config(common, args.overrides);
  const LoadedDataset data = load_manifest_data(args.manifest, cfg.geometry);
  TrainResult result = train_model(data, cfg, !args.no_color);
  for (const ClientDiagnostics& d : result.diagnostics)
    spdlog::info("client {}: {}", d.client_id, d.nonsingularity.describe());
  result.model.provenance.created = creation_stamp();
  save_model(result.model, args.out);
  std::cout << "trained " << result.model.templates.size() << " clients (g=" << result.model.stage.g()
            << ", h=" << result.model.stage.h() << ") -> " << args.out << "\n";
  return kExitAccept;
}

// calibrate ------------------------------------------------------------------

struct CalibrateArgs {
  std::string model;
  std::string manifest;
  std::string out;
};

int cmd_calibrate(const Common& common, const CalibrateArgs& args) {
  Model model = load_model(args.model);
  if (common.threads) model.config.threads = *common.threads;
  const LoadedDataset data = load_manifest_data(args.manifest, model.config.geometry);
  const CalibrationSummary s = calibrate_model(model, data);
  save_model(model, args.out.empty() ? args.model : args.out);
  std::cout << "threshold=" << format_number(s.threshold)
            << " fusion_weight=" << format_number(s.fusion_weight)
            << " far=" << format_number(100.0 * s.far) << "% frr=" << format_number(100.0 * s.frr)
            << "% genuine_trials=" << s.genuine_trials << " impostor_trials=" << s.impostor_trials
            << "\n";
  return kExitAccept;
}

// verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::string model;
  std::string claim;
  std::string image;
  double lx = 0, ly = 0, rx = 0, ry = 0;
  std::optional<std::string> threshold;
};

int cmd_verify(const Common&, const VerifyArgs& args) {
  const Model model = load_model(args.model);
  if (!model.has_client(args.claim))
    throw Error(ErrorKind::kUnknownClient, "client '" + args.claim + "' is not enrolled in the model");
  std::optional<double> threshold;
  if (args.threshold) threshold = parse_threshold(*args.threshold);
  if (!model.calibrated && !threshold)
    spdlog::warn("model is not calibrated; using the default threshold");
  const RawImage img = read_image(args.image);
  const AlignResult aligned =
      align_and_crop(img, {args.ly, args.lx}, {args.ry, args.rx}, model.config.geometry);
  if (aligned.out_of_bounds > 0)
    spdlog::warn("{} crop pixels fell outside the image", aligned.out_of_bounds);
  const VerifyResult r = verify(model, args.claim, aligned.sample, threshold);
  nlohmann::json j{{"claim", args.claim},
                   {"probe", args.image},
                   {"decision", r.accept ? "accept" : "reject"},
                   {"score", r.fused},
                   {"threshold", std::isfinite(r.threshold) ? nlohmann::json(r.threshold)
                                                            : nlohmann::json(format_number(r.threshold))},
                   {"grey_score", r.raw.grey},
                   {"color_score", r.raw.color}};
  std::cout << j.dump() << "\n";
  return r.accept ? kExitAccept : kExitReject;
}

// evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> methods{"CSF", "2D2G", "2D2GC"};
  std::string protocol = "I";
  std::string out;
  std::string text;
  bool no_timing = false;
  int timing_calls = 1000;
  ConfigOverrides overrides;
};

int cmd_evaluate(const Common& common, const EvaluateArgs& args) {
  const RunConfig cfg = resolve_config(common, args.overrides);
  std::vector<Method> methods;
  for (const auto& m : args.methods) methods.push_back(method_from_string(m));
  const ProtocolConfig protocol = protocol_config_from_string(args.protocol);
  const LoadedDataset data = load_manifest_data(args.manifest, cfg.geometry);
  EvalOptions options;
  options.measure_timing = !args.no_timing;
  options.timing_calls = args.timing_calls;
  const EvalReport report = run_comparison(data, protocol, methods, cfg, options);
  if (!args.out.empty()) write_text(args.out, report.to_csv());
  if (!args.text.empty()) write_text(args.text, report.to_text());
  std::cout << report.to_text();
  for (const MethodResult& r : report.rows)
    if (!r.ok()) return kExitUsage;
  return kExitAccept;
}

// inspect --------------------------------------------------------------------

struct InspectArgs {
  std::string model;
  std::string diagnostics_manifest;
  std::string histogram_client;
  std::string histogram_side = "client";
  std::string export_client;
  std::string out;
};

nlohmann::json metadata(const Model& model) {
  nlohmann::json clients = nlohmann::json::object();
  for (const auto& [id, t] : model.templates) {
    const DecisionPolicy& p = model.policy_for(id);
    clients[id] = {{"q", t.q()},
                   {"d", t.d()},
                   {"row_eigenvalues", std::vector<double>(t.row_values.data(), t.row_values.data() + t.row_values.size())},
                   {"col_eigenvalues", std::vector<double>(t.col_values.data(), t.col_values.data() + t.col_values.size())},
                   {"threshold", p.threshold},
                   {"fusion_weight", p.fusion_weight}};
  }
  return {{"format_version", model.format_version},
          {"calibrated", model.calibrated},
          {"dimensions",
           {{"m", model.stage.m()}, {"n", model.stage.n()}, {"g", model.stage.g()}, {"h", model.stage.h()}}},
          {"config", to_json(model.config)},
          {"provenance",
           {{"train_digest", model.provenance.train_digest},
            {"calibration_digest", model.provenance.calibration_digest},
            {"seed", model.provenance.seed},
            {"created", model.provenance.created}}},
          {"color", model.has_color()},
          {"global_policy",
           {{"threshold", model.global_policy.threshold},
            {"fusion_weight", model.global_policy.fusion_weight},
            {"mode", to_string(model.global_policy.mode)}}},
          {"clients", clients}};
}

std::string diagnostics_csv(const Model& model, const std::string& manifest_path) {
  const LoadedDataset all = load_manifest_data(manifest_path, model.config.geometry);
  const LoadedDataset train = select_roles(all, {Role::kClientTrain});
  std::vector<Matrix> images;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    images.push_back(train.samples[i].grey);
    labels.push_back(train.manifest.records[i].subject_id);
  }
  const DiscriminantTrainer trainer(model.stage, images, labels);
  std::ostringstream os;
  os << "client,n_total,n_classes,g,h,col_required,col_condition,row_required,row_condition,"
        "rank_bound,sc_w_rank,sr_w_rank\n";
  for (const auto& [id, t] : model.templates) {
    const NonsingularityDiagnosis d = nonsingularity_check(trainer.scatters(id));
    os << id << ',' << d.n_total << ',' << d.n_classes << ',' << d.g << ',' << d.h << ','
       << format_number(d.col_required) << ',' << (d.col_condition ? "true" : "false") << ','
       << format_number(d.row_required) << ',' << (d.row_condition ? "true" : "false") << ','
       << d.rank_bound << ',' << d.sc_w_rank << ',' << d.sr_w_rank << '\n';
  }
  return os.str();
}

int cmd_inspect(const Common&, const InspectArgs& args) {
  const Model model = load_model(args.model);
  auto emit = [&](const std::string& text) {
    if (args.out.empty())
      std::cout << text;
    else
      write_text(args.out, text);
  };
  if (!args.export_client.empty()) {
    if (args.out.empty()) throw Error(ErrorKind::kInvalidArgument, "--export-client needs --out");
    save_model(export_client(model, args.export_client), args.out);
    return kExitAccept;
  }
  if (!args.histogram_client.empty()) {
    if (!model.has_client(args.histogram_client))
      throw Error(ErrorKind::kUnknownClient,
                  "client '" + args.histogram_client + "' is not enrolled in the model");
    if (!model.has_color()) throw Error(ErrorKind::kInvalidArgument, "model has no colour references");
    const ColorReference& ref = model.color_refs.at(args.histogram_client);
    if (args.histogram_side != "client" && args.histogram_side != "impostor")
      throw Error(ErrorKind::kInvalidArgument, "--side must be client or impostor");
    const ChromaHistogram& h = args.histogram_side == "client" ? ref.client : ref.impostor;
    std::ostringstream os;
    os << "bin_center,weight\n";
    for (int k = 0; k < h.spec.bins; ++k)
      os << format_number(h.spec.bin_center(k)) << ',' << format_number(h.weights[static_cast<std::size_t>(k)])
         << '\n';
    emit(os.str());
    return kExitAccept;
  }
  if (!args.diagnostics_manifest.empty()) {
    emit(diagnostics_csv(model, args.diagnostics_manifest));
    return kExitAccept;
  }
  emit(metadata(model).dump(2) + "\n");
  return kExitAccept;
}

void add_overrides(CLI::App* cmd, ConfigOverrides& ov) {
  cmd->add_option("--pca-g", ov.g, "column projector width (0 = energy rule)");
  cmd->add_option("--pca-h", ov.h, "row projector height (0 = energy rule)");
  cmd->add_option("--fld-q", ov.q, "discriminant rows per client");
  cmd->add_option("--fld-d", ov.d, "discriminant columns per client");
  cmd->add_option("--fusion-mode", ov.fusion_mode, "grey_only, color_only or fused");
  cmd->add_option("--threshold-mode", ov.threshold_mode, "global or per_client");
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("facever");
  spdlog::set_default_logger(logger);
  const auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off")
    throw Error(ErrorKind::kInvalidArgument, "unknown log level '" + level + "'");
  spdlog::set_level(lvl);
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownClient: return kExitUnknownClient;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kBadManifest: return kExitBadManifest;
    case ErrorKind::kDegenerateClient: return kExitDegenerateClient;
    case ErrorKind::kSingularScatter: return kExitSingularScatter;
    case ErrorKind::kBadModel:
    case ErrorKind::kBadConfig: return kExitBadModel;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kAlignmentDegenerate:
    case ErrorKind::kEmptyFeature: return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  CLI::App app{"facever: face verification with two-directional discriminant templates"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path,
                 std::string("JSON config file (default: $") + kConfigEnvVar + ")");
  app.add_option("--seed", common.seed, "random seed");
  app.add_option("--threads", common.threads, "worker threads");
  app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off");

  std::function<int()> action;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic face dataset");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--clients", synth.params.n_clients, "number of clients");
  s->add_option("--train", synth.params.train_per_client, "training samples per client");
  s->add_option("--eval", synth.params.eval_per_client, "evaluation samples per client");
  s->add_option("--test", synth.params.test_per_client, "test samples per client");
  s->add_option("--impostors", synth.params.n_impostors, "impostor subjects (half evaluation, half test)");
  s->add_option("--impostor-samples", synth.params.samples_per_impostor, "samples per impostor");
  s->add_option("--rank", synth.params.rank, "rank-1 terms per grey prototype");
  s->add_option("--grey-sep", synth.params.grey_separation, "identity signal std (grey levels)");
  s->add_option("--chroma-sep", synth.params.chroma_separation, "per-subject Cr/Cb offset std");
  s->add_option("--noise", synth.params.noise, "per-pixel grey noise std");
  s->add_option("--chroma-noise", synth.params.chroma_noise, "per-pixel chroma noise std");
  s->add_option("--variation", synth.params.variation, "per-sample illumination std");
  s->callback([&] { action = [&] { return cmd_synth(common, synth); }; });

  TrainArgs train;
  auto* t = app.add_subcommand("train", "fit the PCA stage and every client template");
  t->add_option("--manifest", train.manifest, "dataset manifest CSV")->required();
  t->add_option("--out", train.out, "model file to write")->required();
  t->add_flag("--no-color", train.no_color, "grey templates only");
  add_overrides(t, train.overrides);
  t->callback([&] { action = [&] { return cmd_train(common, train); }; });

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "set thresholds and fusion weight on the evaluation roles");
  c->add_option("--model", cal.model, "model file")->required();
  c->add_option("--manifest", cal.manifest, "dataset manifest CSV")->required();
  c->add_option("--out", cal.out, "output model file (default: overwrite --model)");
  c->callback([&] { action = [&] { return cmd_calibrate(common, cal); }; });

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "verify one identity claim");
  v->add_option("--model", ver.model, "model file")->required();
  v->add_option("--claim", ver.claim, "claimed client id")->required();
  v->add_option("--image", ver.image, "probe image")->required();
  v->add_option("--lx", ver.lx, "left eye column")->required();
  v->add_option("--ly", ver.ly, "left eye row")->required();
  v->add_option("--rx", ver.rx, "right eye column")->required();
  v->add_option("--ry", ver.ry, "right eye row")->required();
  v->add_option("--threshold", ver.threshold, "override the decision threshold (accepts inf)");
  v->callback([&] { action = [&] { return cmd_verify(common, ver); }; });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "compare methods on a protocol-partitioned dataset");
  e->add_option("--manifest", ev.manifest, "dataset manifest CSV")->required();
  e->add_option("--methods", ev.methods, "subset of CSF,2D2G,2D2GC")->delimiter(',');
  e->add_option("--protocol", ev.protocol, "configuration label, I or II");
  e->add_option("--out", ev.out, "CSV report path");
  e->add_option("--text", ev.text, "text report path");
  e->add_flag("--no-timing", ev.no_timing, "leave timing columns at zero (byte-stable reports)");
  e->add_option("--timing-calls", ev.timing_calls, "verifications timed per method");
  add_overrides(e, ev.overrides);
  e->callback([&] { action = [&] { return cmd_evaluate(common, ev); }; });

  InspectArgs ins;
  auto* i = app.add_subcommand("inspect", "print model metadata, diagnostics or histograms");
  i->add_option("--model", ins.model, "model file")->required();
  i->add_option("--diagnostics", ins.diagnostics_manifest,
                "manifest whose client_train rows give per-client nonsingularity checks (CSV)");
  i->add_option("--histogram", ins.histogram_client, "client whose colour reference to dump (CSV)");
  i->add_option("--side", ins.histogram_side, "client or impostor reference");
  i->add_option("--export-client", ins.export_client, "write a single-client model to --out");
  i->add_option("--out", ins.out, "output path (default: stdout)");
  i->callback([&] { action = [&] { return cmd_inspect(common, ins); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    setup_logging(common.log_level);
    return action();
  } catch (const Error& err) {
    spdlog::error("{}: {}", to_string(err.kind()), err.what());
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    spdlog::error("{}", err.what());
    return kExitUsage;
  }
}

}  // namespace facever::cli
