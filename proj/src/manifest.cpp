// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/manifest.hpp"

#include "facever/error.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace facever {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kBadManifest,
                "line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::kBadManifest,
                "line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return v;
}

std::map<std::string, std::vector<std::size_t>>& role_group(ProtocolPartition& p, Role r) {
  switch (r) {
    case Role::kClientTrain: return p.client_train;
    case Role::kClientEval: return p.client_eval;
    case Role::kClientTest: return p.client_test;
    case Role::kImpostorEval: return p.impostor_eval;
    case Role::kImpostorTest: return p.impostor_test;
  }
  return p.client_train;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::kClientTrain: return "client_train";
    case Role::kClientEval: return "client_eval";
    case Role::kClientTest: return "client_test";
    case Role::kImpostorEval: return "impostor_eval";
    case Role::kImpostorTest: return "impostor_test";
  }
  return "client_train";
}

Role role_from_string(const std::string& text) {
  for (Role r : kAllRoles)
    if (text == to_string(r)) return r;
  throw Error(ErrorKind::kBadManifest, "unknown role label '" + text + "'");
}

const char* to_string(ProtocolConfig c) { return c == ProtocolConfig::kI ? "I" : "II"; }

ProtocolConfig protocol_config_from_string(const std::string& text) {
  if (text == "I" || text == "1") return ProtocolConfig::kI;
  if (text == "II" || text == "2") return ProtocolConfig::kII;
  throw Error(ErrorKind::kInvalidArgument, "unknown protocol configuration '" + text + "'");
}

std::filesystem::path DatasetManifest::resolve(const ManifestRecord& r) const {
  const std::filesystem::path p(r.path);
  return p.is_absolute() ? p : base_dir / p;
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kManifestHeader)
        throw Error(ErrorKind::kBadManifest,
                    std::string("manifest header must be '") + kManifestHeader + "'");
      have_header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 8)
      throw Error(ErrorKind::kBadManifest,
                  "line " + std::to_string(line_no) + ": expected 8 fields, got " +
                      std::to_string(f.size()));
    ManifestRecord r;
    r.path = f[0];
    r.subject_id = f[1];
    if (r.path.empty() || r.subject_id.empty())
      throw Error(ErrorKind::kBadManifest, "line " + std::to_string(line_no) + ": empty path or subject");
    r.session = parse_int(f[2], "session", line_no);
    try {
      r.role = role_from_string(f[3]);
    } catch (const Error& e) {
      throw Error(ErrorKind::kBadManifest, "line " + std::to_string(line_no) + ": " + e.what());
    }
    r.lx = parse_double(f[4], "lx", line_no);
    r.ly = parse_double(f[5], "ly", line_no);
    r.rx = parse_double(f[6], "rx", line_no);
    r.ry = parse_double(f[7], "ry", line_no);
    m.records.push_back(std::move(r));
  }
  if (!have_header) throw Error(ErrorKind::kBadManifest, "manifest is empty");
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

std::string canonical_line(const ManifestRecord& r) {
  std::ostringstream os;
  os << r.path << ',' << r.subject_id << ',' << r.session << ',' << to_string(r.role) << ','
     << format_double(r.lx) << ',' << format_double(r.ly) << ',' << format_double(r.rx) << ','
     << format_double(r.ry);
  return os.str();
}

void write_manifest_csv(std::ostream& out, std::span<const ManifestRecord> records) {
  out << kManifestHeader << '\n';
  for (const ManifestRecord& r : records) out << canonical_line(r) << '\n';
}

std::string records_digest(std::span<const ManifestRecord> records) {
  std::string text;
  for (const ManifestRecord& r : records) text += canonical_line(r) + '\n';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::kIo, "SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

const std::map<std::string, std::vector<std::size_t>>& ProtocolPartition::by_role(Role r) const {
  switch (r) {
    case Role::kClientTrain: return client_train;
    case Role::kClientEval: return client_eval;
    case Role::kClientTest: return client_test;
    case Role::kImpostorEval: return impostor_eval;
    case Role::kImpostorTest: return impostor_test;
  }
  return client_train;
}

std::vector<std::string> ProtocolPartition::clients() const {
  std::set<std::string> ids;
  for (Role r : {Role::kClientTrain, Role::kClientEval, Role::kClientTest})
    for (const auto& kv : by_role(r)) ids.insert(kv.first);
  return {ids.begin(), ids.end()};
}

std::size_t ProtocolPartition::count(Role r) const {
  std::size_t n = 0;
  for (const auto& kv : by_role(r)) n += kv.second.size();
  return n;
}

ProtocolPartition partition(const DatasetManifest& manifest, ProtocolConfig config) {
  ProtocolPartition p;
  p.config = config;
  std::map<std::string, Role> seen_paths;
  std::map<std::string, Role> subject_kind;  // first role seen per subject
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const ManifestRecord& r = manifest.records[i];
    if (auto [it, fresh] = seen_paths.emplace(r.path, r.role); !fresh) {
      throw Error(ErrorKind::kBadManifest, "image '" + r.path + "' is listed under both " +
                                               to_string(it->second) + " and " + to_string(r.role));
    }
    auto [it, fresh] = subject_kind.emplace(r.subject_id, r.role);
    if (!fresh) {
      const Role first = it->second;
      const bool clash = is_client_role(first) != is_client_role(r.role) ||
                         (!is_client_role(first) && first != r.role);
      if (clash)
        throw Error(ErrorKind::kBadManifest, "subject '" + r.subject_id + "' appears as both " +
                                                 to_string(first) + " and " + to_string(r.role));
    }
    role_group(p, r.role)[r.subject_id].push_back(i);
  }

  const auto clients = p.clients();
  for (Role role : {Role::kClientTrain, Role::kClientEval, Role::kClientTest}) {
    const auto& group = p.by_role(role);
    if (group.empty()) continue;
    for (const std::string& c : clients)
      if (!group.count(c))
        throw Error(ErrorKind::kBadManifest,
                    "client '" + c + "' has no samples in role " + to_string(role));
  }
  return p;
}

void require_role(const ProtocolPartition& p, Role r) {
  if (p.by_role(r).empty())
    throw Error(ErrorKind::kBadManifest, std::string("manifest has no ") + to_string(r) + " records");
}

std::vector<ManifestRecord> records_with_role(const DatasetManifest& m, Role r) {
  std::vector<ManifestRecord> out;
  for (const ManifestRecord& rec : m.records)
    if (rec.role == r) out.push_back(rec);
  return out;
}

}  // namespace facever
