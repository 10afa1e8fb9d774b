// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/dataset.hpp"
#include "facever/synth.hpp"

namespace fixture {

/// Small seeded synthetic benchmark, aligned and ready for training.
inline facever::SynthParams small_params(std::uint64_t seed = 7) {
  facever::SynthParams p;
  p.seed = seed;
  p.n_clients = 6;
  p.train_per_client = 6;
  p.eval_per_client = 3;
  p.test_per_client = 3;
  p.n_impostors = 4;
  p.samples_per_impostor = 3;
  p.grey_separation = 6.0;
  p.chroma_separation = 10.0;
  return p;
}

inline facever::LoadedDataset load(const facever::SynthParams& p) {
  const facever::SyntheticDataset d = facever::synth_generate(p);
  return facever::align_dataset(d.manifest, d.images, p.geometry);
}

inline facever::LoadedDataset small_dataset(std::uint64_t seed = 7) { return load(small_params(seed)); }

}  // namespace fixture
