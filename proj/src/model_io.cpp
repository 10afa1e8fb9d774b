// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/model_io.hpp"

#include "facever/error.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace facever {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "model payloads are stored as little-endian doubles");

namespace {

constexpr const char* kFormatName = "facever-model";

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::kBadModel, what); }

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

const json& sub(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing field '" + key + "'");
  return j.at(key);
}

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " is " << m.rows() << "x" << m.cols() << " but the recorded dimensions require "
       << rows << "x" << cols;
    bad(os.str());
  }
}

json vector_to_json(const Vector& v) { return matrix_to_json(Matrix(v)); }

Vector vector_from_json(const json& j, const std::string& name, Eigen::Index size) {
  const Matrix m = matrix_from_json(j, name);
  expect_shape(m, size, 1, name);
  return m.col(0);
}

json histogram_to_json(const ChromaHistogram& h) {
  Matrix w(static_cast<Eigen::Index>(h.weights.size()), 1);
  for (std::size_t k = 0; k < h.weights.size(); ++k) w(static_cast<Eigen::Index>(k)) = h.weights[k];
  return json{{"bins", h.spec.bins},
              {"lo", h.spec.lo},
              {"hi", h.spec.hi},
              {"pixel_count", h.pixel_count},
              {"weights", matrix_to_json(w)}};
}

ChromaHistogram histogram_from_json(const json& j, const HistogramSpec& expected,
                                    const std::string& name) {
  ChromaHistogram h;
  h.spec.bins = field<int>(j, "bins", name);
  h.spec.lo = field<double>(j, "lo", name);
  h.spec.hi = field<double>(j, "hi", name);
  if (!(h.spec == expected)) bad(name + ": binning disagrees with the model's histogram settings");
  h.pixel_count = field<long>(j, "pixel_count", name);
  const Matrix w = matrix_from_json(sub(j, "weights", name), name + ".weights");
  expect_shape(w, h.spec.bins, 1, name + ".weights");
  h.weights.assign(w.data(), w.data() + w.size());
  return h;
}

json policy_to_json(const DecisionPolicy& p) {
  return json{{"threshold", p.threshold},
              {"fusion_weight", p.fusion_weight},
              {"mode", to_string(p.mode)},
              {"grey_mean", p.grey_stats.mean},
              {"grey_std", p.grey_stats.std},
              {"color_mean", p.color_stats.mean},
              {"color_std", p.color_stats.std}};
}

DecisionPolicy policy_from_json(const json& j, const std::string& name) {
  DecisionPolicy p;
  p.threshold = field<double>(j, "threshold", name);
  p.fusion_weight = field<double>(j, "fusion_weight", name);
  try {
    p.mode = fusion_mode_from_string(field<std::string>(j, "mode", name));
  } catch (const Error& e) {
    bad(name + ": " + e.what());
  }
  p.grey_stats = {field<double>(j, "grey_mean", name), field<double>(j, "grey_std", name)};
  p.color_stats = {field<double>(j, "color_mean", name), field<double>(j, "color_std", name)};
  try {
    p.validate();
  } catch (const Error& e) {
    bad(name + ": " + e.what());
  }
  return p;
}

std::set<std::string> keys_of(const json& j) {
  std::set<std::string> out;
  for (const auto& [k, v] : j.items()) out.insert(k);
  return out;
}

}  // namespace

std::string base64_encode(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) bad("base64 payload length is not a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) bad("payload is not valid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

json matrix_to_json(const Matrix& m) {
  const std::vector<double> flat = to_row_major(m);
  std::string bytes(flat.size() * sizeof(double), '\0');
  if (!flat.empty()) std::memcpy(bytes.data(), flat.data(), bytes.size());
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"dtype", "f64le"}, {"data", base64_encode(bytes)}};
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  const auto rows = field<long>(j, "rows", name);
  const auto cols = field<long>(j, "cols", name);
  if (rows < 0 || cols < 0) bad(name + ": negative dimensions");
  if (field<std::string>(j, "dtype", name) != "f64le") bad(name + ": unsupported dtype");
  const std::string bytes = base64_decode(field<std::string>(j, "data", name));
  const auto expected = static_cast<std::size_t>(rows * cols) * sizeof(double);
  if (bytes.size() != expected) {
    std::ostringstream os;
    os << name << " declares " << rows << "x" << cols << " (" << expected
       << " bytes) but its payload holds " << bytes.size() << " bytes";
    bad(os.str());
  }
  std::vector<double> flat(static_cast<std::size_t>(rows * cols));
  if (!flat.empty()) std::memcpy(flat.data(), bytes.data(), bytes.size());
  return from_row_major(flat, rows, cols);
}

json model_to_json(const Model& model) {
  const std::set<std::string> ids = [&] {
    std::set<std::string> s;
    for (const auto& kv : model.templates) s.insert(kv.first);
    return s;
  }();
  const bool color = !model.color_refs.empty();
  for (const auto& id : ids)
    if ((color && !model.color_refs.count(id)) || !model.policies.count(id))
      throw Error(ErrorKind::kBadModel, "client '" + id + "' lacks a colour reference or policy");
  if ((color && model.color_refs.size() != ids.size()) || model.policies.size() != ids.size())
    throw Error(ErrorKind::kBadModel, "colour references or policies name clients without templates");

  const PcaStage& st = model.stage;
  json j;
  j["format"] = kFormatName;
  j["format_version"] = model.format_version;
  j["config"] = to_json(model.config);
  j["calibrated"] = model.calibrated;
  j["provenance"] = {{"train_digest", model.provenance.train_digest},
                     {"calibration_digest", model.provenance.calibration_digest},
                     {"seed", model.provenance.seed},
                     {"created", model.provenance.created}};
  j["pca_stage"] = {{"m", st.m()},
                    {"n", st.n()},
                    {"g", st.g()},
                    {"h", st.h()},
                    {"mean", matrix_to_json(st.mean)},
                    {"x_p", matrix_to_json(st.x_p)},
                    {"z_p", matrix_to_json(st.z_p)},
                    {"eigvals_col", vector_to_json(st.eigvals_col)},
                    {"eigvals_row", vector_to_json(st.eigvals_row)}};
  json templates = json::object();
  for (const auto& [id, t] : model.templates) {
    templates[id] = {{"q", t.q()},
                     {"d", t.d()},
                     {"z", matrix_to_json(t.z)},
                     {"x", matrix_to_json(t.x)},
                     {"z_f", matrix_to_json(t.z_f)},
                     {"x_f", matrix_to_json(t.x_f)},
                     {"m_c", matrix_to_json(t.m_c)},
                     {"m_i", matrix_to_json(t.m_i)},
                     {"row_values", vector_to_json(t.row_values)},
                     {"col_values", vector_to_json(t.col_values)}};
  }
  j["client_templates"] = std::move(templates);
  json colors = json::object();
  for (const auto& [id, c] : model.color_refs) {
    colors[id] = {{"client", histogram_to_json(c.client)},
                  {"impostor", histogram_to_json(c.impostor)},
                  {"gaussian_mean", c.client_gaussian.mean},
                  {"gaussian_std", c.client_gaussian.std}};
  }
  j["color_references"] = std::move(colors);
  json policies = json::object();
  for (const auto& [id, p] : model.policies) policies[id] = policy_to_json(p);
  j["policies"] = std::move(policies);
  j["global_policy"] = policy_to_json(model.global_policy);
  return j;
}

Model model_from_json(const json& j) {
  if (!j.is_object()) bad("model file is not a JSON object");
  if (field<std::string>(j, "format", "model") != kFormatName) bad("not a facever model file");
  Model model;
  model.format_version = field<int>(j, "format_version", "model");
  if (model.format_version != kModelFormatVersion)
    bad("unsupported model format version " + std::to_string(model.format_version));
  try {
    model.config = config_from_json(sub(j, "config", "model"));
  } catch (const Error& e) {
    bad(std::string("model config: ") + e.what());
  }
  model.calibrated = field<bool>(j, "calibrated", "model");
  const json& prov = sub(j, "provenance", "model");
  model.provenance.train_digest = field<std::string>(prov, "train_digest", "provenance");
  model.provenance.calibration_digest = field<std::string>(prov, "calibration_digest", "provenance");
  model.provenance.seed = field<std::uint64_t>(prov, "seed", "provenance");
  model.provenance.created = field<std::string>(prov, "created", "provenance");

  const json& js = sub(j, "pca_stage", "model");
  const auto m = field<long>(js, "m", "pca_stage");
  const auto n = field<long>(js, "n", "pca_stage");
  const auto g = field<long>(js, "g", "pca_stage");
  const auto h = field<long>(js, "h", "pca_stage");
  if (m != model.config.geometry.rows || n != model.config.geometry.cols)
    bad("pca_stage dimensions disagree with the model geometry");
  if (g < 1 || g > n || h < 1 || h > m) bad("pca_stage has out-of-range g/h");
  PcaStage& st = model.stage;
  st.mean = matrix_from_json(sub(js, "mean", "pca_stage"), "pca_stage.mean");
  expect_shape(st.mean, m, n, "pca_stage.mean");
  st.x_p = matrix_from_json(sub(js, "x_p", "pca_stage"), "pca_stage.x_p");
  expect_shape(st.x_p, n, g, "pca_stage.x_p");
  st.z_p = matrix_from_json(sub(js, "z_p", "pca_stage"), "pca_stage.z_p");
  expect_shape(st.z_p, h, m, "pca_stage.z_p");
  st.eigvals_col = vector_from_json(sub(js, "eigvals_col", "pca_stage"), "pca_stage.eigvals_col", g);
  st.eigvals_row = vector_from_json(sub(js, "eigvals_row", "pca_stage"), "pca_stage.eigvals_row", h);

  const json& jt = sub(j, "client_templates", "model");
  const json& jc = sub(j, "color_references", "model");
  const json& jp = sub(j, "policies", "model");
  if (!jt.is_object() || !jc.is_object() || !jp.is_object()) bad("client maps must be JSON objects");
  if ((!jc.empty() && keys_of(jt) != keys_of(jc)) || keys_of(jt) != keys_of(jp))
    bad("client templates, colour references and policies name different clients");

  for (const auto& [id, t] : jt.items()) {
    const std::string where = "client_templates." + id;
    ClientTemplate ct;
    ct.client_id = id;
    const auto q = field<long>(t, "q", where);
    const auto d = field<long>(t, "d", where);
    if (q < 1 || q > h || d < 1 || d > g) bad(where + ": q/d out of range");
    ct.z = matrix_from_json(sub(t, "z", where), where + ".z");
    expect_shape(ct.z, q, m, where + ".z");
    ct.x = matrix_from_json(sub(t, "x", where), where + ".x");
    expect_shape(ct.x, n, d, where + ".x");
    ct.z_f = matrix_from_json(sub(t, "z_f", where), where + ".z_f");
    expect_shape(ct.z_f, q, h, where + ".z_f");
    ct.x_f = matrix_from_json(sub(t, "x_f", where), where + ".x_f");
    expect_shape(ct.x_f, g, d, where + ".x_f");
    ct.m_c = matrix_from_json(sub(t, "m_c", where), where + ".m_c");
    expect_shape(ct.m_c, q, d, where + ".m_c");
    ct.m_i = matrix_from_json(sub(t, "m_i", where), where + ".m_i");
    expect_shape(ct.m_i, q, d, where + ".m_i");
    ct.row_values = vector_from_json(sub(t, "row_values", where), where + ".row_values", q);
    ct.col_values = vector_from_json(sub(t, "col_values", where), where + ".col_values", d);
    model.templates.emplace(id, std::move(ct));
  }
  for (const auto& [id, c] : jc.items()) {
    const std::string where = "color_references." + id;
    ColorReference ref;
    ref.client = histogram_from_json(sub(c, "client", where), model.config.histogram, where + ".client");
    ref.impostor =
        histogram_from_json(sub(c, "impostor", where), model.config.histogram, where + ".impostor");
    ref.client_gaussian = {field<double>(c, "gaussian_mean", where), field<double>(c, "gaussian_std", where)};
    model.color_refs.emplace(id, std::move(ref));
  }
  for (const auto& [id, p] : jp.items()) model.policies.emplace(id, policy_from_json(p, "policies." + id));
  model.global_policy = policy_from_json(sub(j, "global_policy", "model"), "global_policy");
  return model;
}

std::string serialize_model(const Model& model) { return model_to_json(model).dump(1) + "\n"; }

Model deserialize_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot move model into place at '" + path.string() + "'");
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

Model export_client(const Model& model, const std::string& client_id) {
  if (!model.has_client(client_id))
    throw Error(ErrorKind::kUnknownClient, "client '" + client_id + "' is not enrolled in the model");
  Model out = model;
  out.templates = {{client_id, model.templates.at(client_id)}};
  if (model.has_color()) out.color_refs = {{client_id, model.color_refs.at(client_id)}};
  out.policies = {{client_id, model.policies.at(client_id)}};
  return out;
}

}  // namespace facever
