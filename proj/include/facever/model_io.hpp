// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace facever {

/// Model file layout: a JSON object holding metadata, dimensions and
/// provenance. Every matrix is {"rows", "cols", "dtype": "f64le", "data"}
/// where data is base64 of the row-major little-endian doubles.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& text);

/// Writes to a temporary sibling and renames it into place.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// A model holding one client only, for deployment on a single device.
Model export_client(const Model& model, const std::string& client_id);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& name);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

/// Writes text to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace facever
