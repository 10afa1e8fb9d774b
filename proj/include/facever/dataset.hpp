// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/imaging.hpp"
#include "facever/manifest.hpp"

#include <span>
#include <vector>

namespace facever {

/// A manifest together with the aligned face of every record;
/// samples[i] belongs to manifest.records[i].
struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<FaceSample> samples;
};

/// Reads and aligns every record's image from disk.
LoadedDataset load_dataset(const DatasetManifest& manifest, const GeometryConfig& geo);

/// Aligns images that are already in memory (one per record, same order).
LoadedDataset align_dataset(const DatasetManifest& manifest, std::span<const RawImage> images,
                            const GeometryConfig& geo);

/// Reads and aligns a single record; logs a warning when the warp needed
/// pixels from outside the image.
FaceSample load_sample(const DatasetManifest& manifest, const ManifestRecord& record,
                       const GeometryConfig& geo);

/// The subset of a dataset whose records carry one of the given roles,
/// preserving manifest order.
LoadedDataset select_roles(const LoadedDataset& data, std::initializer_list<Role> roles);

}  // namespace facever
