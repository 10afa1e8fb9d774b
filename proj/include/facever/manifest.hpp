// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/imaging.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace facever {

enum class Role { kClientTrain, kClientEval, kClientTest, kImpostorEval, kImpostorTest };

inline constexpr Role kAllRoles[] = {Role::kClientTrain, Role::kClientEval, Role::kClientTest,
                                     Role::kImpostorEval, Role::kImpostorTest};

const char* to_string(Role role);
Role role_from_string(const std::string& text);
inline bool is_client_role(Role r) {
  return r == Role::kClientTrain || r == Role::kClientEval || r == Role::kClientTest;
}

struct ManifestRecord {
  std::string path;  // relative to the manifest directory unless absolute
  std::string subject_id;
  int session = 0;
  Role role = Role::kClientTrain;
  double lx = 0, ly = 0, rx = 0, ry = 0;  // eye centres, x = column, y = row

  PixelPoint left_eye() const { return {ly, lx}; }
  PixelPoint right_eye() const { return {ry, rx}; }
};

inline constexpr const char* kManifestHeader = "path,subject_id,session,role,lx,ly,rx,ry";

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestRecord& r) const;
};

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest_csv(std::ostream& out, std::span<const ManifestRecord> records);

/// Canonical CSV line for one record; the digest is computed over these.
std::string canonical_line(const ManifestRecord& r);

/// Hex SHA-256 over the canonical lines of the given records, in order.
std::string records_digest(std::span<const ManifestRecord> records);

enum class ProtocolConfig { kI, kII };
const char* to_string(ProtocolConfig c);
ProtocolConfig protocol_config_from_string(const std::string& text);

/// Record indices grouped by role and subject. Subjects are ordered by id.
struct ProtocolPartition {
  ProtocolConfig config = ProtocolConfig::kI;
  std::map<std::string, std::vector<std::size_t>> client_train;
  std::map<std::string, std::vector<std::size_t>> client_eval;
  std::map<std::string, std::vector<std::size_t>> client_test;
  std::map<std::string, std::vector<std::size_t>> impostor_eval;
  std::map<std::string, std::vector<std::size_t>> impostor_test;

  const std::map<std::string, std::vector<std::size_t>>& by_role(Role r) const;
  std::vector<std::string> clients() const;
  std::size_t count(Role r) const;
};

/// Validates and indexes the manifest's role labels. Rejects an image listed
/// twice, a subject that is both client and impostor, a subject in both
/// impostor roles, and a client that lacks a client role which the manifest
/// uses for other clients. A role absent from the whole manifest is allowed;
/// use require_role where a command needs it.
ProtocolPartition partition(const DatasetManifest& manifest, ProtocolConfig config);

void require_role(const ProtocolPartition& p, Role r);

/// Records selected by role, in manifest order.
std::vector<ManifestRecord> records_with_role(const DatasetManifest& m, Role r);

}  // namespace facever
