// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/synth.hpp"

#include "facever/error.hpp"
#include "facever/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace facever {

namespace {

constexpr double kHairFraction = 0.12;

std::mt19937_64 subject_rng(std::uint64_t seed, char kind, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double std) {
  std::normal_distribution<double> nd(0.0, std);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = nd(rng);
  return m;
}

int hair_rows(const GeometryConfig& geo) {
  return static_cast<int>(std::lround(kHairFraction * geo.rows));
}

Matrix base_face(const GeometryConfig& geo) {
  const int m = geo.rows, n = geo.cols;
  Matrix face(m, n);
  const PixelPoint le = geo.left_target_px(), re = geo.right_target_px();
  const double cr = 0.55 * (m - 1), cc = 0.5 * (n - 1);
  const double eye_r = 0.05 * n;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      const double dr = (r - cr) / (0.55 * m), dc = (c - cc) / (0.5 * n);
      double v = 170.0 - 60.0 * (dr * dr + dc * dc);
      for (const PixelPoint& e : {le, re}) {
        const double d2 = ((r - e.row) * (r - e.row) + (c - e.col) * (c - e.col)) / (eye_r * eye_r);
        v -= 60.0 * std::exp(-d2);
      }
      const double mouth = (r - 0.8 * (m - 1)) / 1.5;
      if (std::abs(c - cc) < 0.15 * n) v -= 35.0 * std::exp(-mouth * mouth);
      face(r, c) = v;
    }
  return face;
}

struct Subject {
  Matrix identity;  // m x n grey offset
  double cr = 150.0;
  double cb = 105.0;
};

Subject make_subject(const SynthParams& p, char kind, int index) {
  auto rng = subject_rng(p.seed, kind, index);
  const int m = p.geometry.rows, n = p.geometry.cols;
  Subject s;
  s.identity = Matrix::Zero(m, n);
  const double amp = p.grey_separation / std::sqrt(static_cast<double>(p.rank));
  for (int k = 0; k < p.rank; ++k)
    s.identity += amp * gaussian_matrix(rng, m, 1, 1.0) * gaussian_matrix(rng, 1, n, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  s.cr = std::clamp(150.0 + p.chroma_separation * nd(rng), 136.0, 170.0);
  s.cb = std::clamp(105.0 + p.chroma_separation * nd(rng), 80.0, 124.0);
  return s;
}

RawImage render(const SynthParams& p, const Matrix& face, const Subject& s, char kind, int index,
                int sample) {
  auto rng = subject_rng(p.seed, kind, 100000 + 1000 * index + sample);
  const int m = p.geometry.rows, n = p.geometry.cols;
  std::normal_distribution<double> nd(0.0, 1.0);
  const double tilt_lr = p.variation * nd(rng);
  const double tilt_tb = p.variation * nd(rng);
  const Matrix noise = gaussian_matrix(rng, m, n, p.noise);
  const Matrix cr_noise = gaussian_matrix(rng, m, n, p.chroma_noise);
  const Matrix cb_noise = gaussian_matrix(rng, m, n, p.chroma_noise);
  const int hair = hair_rows(p.geometry);

  RawImage img(n, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      double y, cr, cb;
      if (r < hair) {
        y = 45.0 + 0.25 * noise(r, c);
        cr = 128.0 + 0.5 * cr_noise(r, c);
        cb = 128.0 + 0.5 * cb_noise(r, c);
      } else {
        const double u = 2.0 * c / std::max(n - 1, 1) - 1.0;
        const double v = 2.0 * r / std::max(m - 1, 1) - 1.0;
        y = face(r, c) + s.identity(r, c) + tilt_lr * u + tilt_tb * v + noise(r, c);
        cr = s.cr + cr_noise(r, c);
        cb = s.cb + cb_noise(r, c);
      }
      y = std::clamp(y, 16.0, 235.0);
      double rgb[3];
      ycbcr_to_rgb(y, cr, cb, rgb[0], rgb[1], rgb[2]);
      for (int ch = 0; ch < 3; ++ch)
        img.at(r, c, ch) = static_cast<std::uint8_t>(std::clamp(std::lround(rgb[ch]), 0L, 255L));
    }
  return img;
}

std::string image_name(const std::string& subject, int k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "img/%s_%02d.ppm", subject.c_str(), k);
  return buf;
}

std::string subject_name(char kind, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%03d", kind, index);
  return buf;
}

}  // namespace

void SynthParams::validate() const {
  geometry.validate();
  if (n_clients < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two clients");
  if (train_per_client < 1 || eval_per_client < 0 || test_per_client < 0)
    throw Error(ErrorKind::kInvalidArgument, "per-client sample counts must be positive");
  if (n_impostors < 0 || samples_per_impostor < 1)
    throw Error(ErrorKind::kInvalidArgument, "impostor counts must be positive");
  if (rank < 1) throw Error(ErrorKind::kInvalidArgument, "prototype rank must be positive");
  if (grey_separation < 0 || chroma_separation < 0 || noise < 0 || chroma_noise < 0 || variation < 0)
    throw Error(ErrorKind::kInvalidArgument, "separations and noise levels must be nonnegative");
}

SyntheticDataset synth_generate(const SynthParams& params) {
  params.validate();
  const GeometryConfig& geo = params.geometry;
  const Matrix face = base_face(geo);
  const PixelPoint le = geo.left_target_px(), re = geo.right_target_px();

  SyntheticDataset out;
  auto add = [&](const std::string& id, int k, Role role, RawImage img) {
    ManifestRecord rec;
    rec.path = image_name(id, k);
    rec.subject_id = id;
    rec.session = k + 1;
    rec.role = role;
    rec.lx = le.col;
    rec.ly = le.row;
    rec.rx = re.col;
    rec.ry = re.row;
    out.manifest.records.push_back(std::move(rec));
    out.images.push_back(std::move(img));
  };

  for (int i = 0; i < params.n_clients; ++i) {
    const Subject s = make_subject(params, 'c', i);
    const std::string id = subject_name('c', i);
    int k = 0;
    for (const auto& [role, count] : {std::pair{Role::kClientTrain, params.train_per_client},
                                      std::pair{Role::kClientEval, params.eval_per_client},
                                      std::pair{Role::kClientTest, params.test_per_client}})
      for (int j = 0; j < count; ++j, ++k) add(id, k, role, render(params, face, s, 'c', i, k));
  }
  const int n_eval_imp = (params.n_impostors + 1) / 2;
  for (int i = 0; i < params.n_impostors; ++i) {
    const Subject s = make_subject(params, 'i', i);
    const std::string id = subject_name('i', i);
    const Role role = i < n_eval_imp ? Role::kImpostorEval : Role::kImpostorTest;
    for (int k = 0; k < params.samples_per_impostor; ++k)
      add(id, k, role, render(params, face, s, 'i', i, k));
  }
  return out;
}

void write_synthetic(SyntheticDataset& data, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "img", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + (out_dir / "img").string() + "'");
  for (std::size_t i = 0; i < data.images.size(); ++i)
    write_ppm(out_dir / data.manifest.records[i].path, data.images[i]);
  std::ofstream out(out_dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + (out_dir / "manifest.csv").string() + "'");
  write_manifest_csv(out, data.manifest.records);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + (out_dir / "manifest.csv").string() + "'");
  data.manifest.base_dir = out_dir;
}

}  // namespace facever
