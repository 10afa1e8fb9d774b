// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/dataset.hpp"

#include "facever/error.hpp"
#include "facever/image_io.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace facever {

namespace {

FaceSample align_record(const RawImage& img, const ManifestRecord& r, const GeometryConfig& geo) {
  AlignResult a = align_and_crop(img, r.left_eye(), r.right_eye(), geo);
  if (a.out_of_bounds > 0)
    spdlog::warn("'{}': {} crop pixels fell outside the source image and were mean-filled", r.path,
                 a.out_of_bounds);
  a.sample.subject_id = r.subject_id;
  a.sample.session = r.session;
  return std::move(a.sample);
}

}  // namespace

FaceSample load_sample(const DatasetManifest& manifest, const ManifestRecord& record,
                       const GeometryConfig& geo) {
  return align_record(read_image(manifest.resolve(record)), record, geo);
}

LoadedDataset load_dataset(const DatasetManifest& manifest, const GeometryConfig& geo) {
  LoadedDataset out;
  out.manifest = manifest;
  out.samples.reserve(manifest.records.size());
  for (const ManifestRecord& r : manifest.records) out.samples.push_back(load_sample(manifest, r, geo));
  return out;
}

LoadedDataset align_dataset(const DatasetManifest& manifest, std::span<const RawImage> images,
                            const GeometryConfig& geo) {
  if (images.size() != manifest.records.size())
    throw Error(ErrorKind::kInvalidArgument, "one image is required per manifest record");
  LoadedDataset out;
  out.manifest = manifest;
  out.samples.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    out.samples.push_back(align_record(images[i], manifest.records[i], geo));
  return out;
}

LoadedDataset select_roles(const LoadedDataset& data, std::initializer_list<Role> roles) {
  LoadedDataset out;
  out.manifest.base_dir = data.manifest.base_dir;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const ManifestRecord& r = data.manifest.records[i];
    if (std::find(roles.begin(), roles.end(), r.role) == roles.end()) continue;
    out.manifest.records.push_back(r);
    out.samples.push_back(data.samples[i]);
  }
  return out;
}

}  // namespace facever
