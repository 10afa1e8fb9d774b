// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/imaging.hpp"
#include "facever/manifest.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace facever {

/// Parameters of the synthetic face generator. Separations and noise are in
/// 8-bit intensity units.
struct SynthParams {
  std::uint64_t seed = 1;
  int n_clients = 20;
  int train_per_client = 8;
  int eval_per_client = 4;
  int test_per_client = 4;
  int n_impostors = 10;       // the first half are evaluation impostors
  int samples_per_impostor = 4;
  GeometryConfig geometry;
  int rank = 2;                    // rank-1 terms per grey prototype
  double grey_separation = 3.0;    // per-pixel std of the identity term
  double chroma_separation = 8.0;  // std of per-subject Cr/Cb offsets
  double noise = 20.0;             // per-pixel grey noise std
  double chroma_noise = 6.0;       // per-pixel Cr/Cb noise std
  double variation = 10.0;         // std of per-sample illumination terms

  void validate() const;
};

struct SyntheticDataset {
  DatasetManifest manifest;
  std::vector<RawImage> images;  // one per manifest record
};

/// Deterministic per seed. Images have the configured crop size with the eyes
/// annotated at the canonical targets, so alignment is the identity.
SyntheticDataset synth_generate(const SynthParams& params);

/// Writes img/<subject>_<k>.ppm and manifest.csv below out_dir and points
/// the manifest's base directory at it.
void write_synthetic(SyntheticDataset& data, const std::filesystem::path& out_dir);

}  // namespace facever
