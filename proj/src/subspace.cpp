// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/subspace.hpp"

#include "facever/error.hpp"

#include <sstream>

namespace facever {

namespace {

void check_samples(std::span<const Matrix> samples) {
  if (samples.empty()) throw Error(ErrorKind::kInvalidArgument, "scatter needs at least one sample");
  const auto rows = samples.front().rows();
  const auto cols = samples.front().cols();
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].rows() != rows || samples[i].cols() != cols) {
      std::ostringstream os;
      os << "sample " << i << " is " << samples[i].rows() << "x" << samples[i].cols()
         << ", expected " << rows << "x" << cols;
      throw Error(ErrorKind::kShapeMismatch, os.str());
    }
  }
}

}  // namespace

Matrix sample_mean(std::span<const Matrix> samples) {
  check_samples(samples);
  Matrix sum = Matrix::Zero(samples.front().rows(), samples.front().cols());
  for (const Matrix& a : samples) sum += a;
  return sum / static_cast<double>(samples.size());
}

SymMatrix column_total_scatter(std::span<const Matrix> samples) {
  const Matrix mean = sample_mean(samples);
  Matrix acc = Matrix::Zero(mean.cols(), mean.cols());
  Matrix dev(mean.rows(), mean.cols());
  for (const Matrix& a : samples) {
    dev = a - mean;
    acc.noalias() += dev.transpose() * dev;
  }
  return SymMatrix::from_symmetric_part(acc / static_cast<double>(samples.size()));
}

SymMatrix row_total_scatter(std::span<const Matrix> samples) {
  const Matrix mean = sample_mean(samples);
  Matrix acc = Matrix::Zero(mean.rows(), mean.rows());
  Matrix dev(mean.rows(), mean.cols());
  for (const Matrix& a : samples) {
    dev = a - mean;
    acc.noalias() += dev * dev.transpose();
  }
  return SymMatrix::from_symmetric_part(acc / static_cast<double>(samples.size()));
}

int energy_dimension(const Vector& descending_values, double energy) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < descending_values.size(); ++i)
    total += std::max(descending_values(i), 0.0);
  if (!(total > 0.0)) return 1;
  double running = 0.0;
  for (Eigen::Index i = 0; i < descending_values.size(); ++i) {
    running += std::max(descending_values(i), 0.0);
    if (running >= energy * total) return static_cast<int>(i + 1);
  }
  return static_cast<int>(descending_values.size());
}

PcaStage fit_pca_stage(std::span<const Matrix> samples, const PcaOptions& options) {
  if (samples.size() < 2)
    throw Error(ErrorKind::kInvalidArgument, "PCA stage needs at least two samples");
  check_samples(samples);
  const auto m = samples.front().rows();
  const auto n = samples.front().cols();
  if (options.g < 0 || options.g > n || options.h < 0 || options.h > m) {
    std::ostringstream os;
    os << "projector sizes g=" << options.g << ", h=" << options.h << " out of range for "
       << m << "x" << n << " samples";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (!(options.energy > 0.0 && options.energy <= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "energy fraction must lie in (0, 1]");

  const EigenPairs col = jacobi_eigen(column_total_scatter(samples));
  const EigenPairs row = jacobi_eigen(row_total_scatter(samples));
  const int g = options.g > 0 ? options.g : energy_dimension(col.values, options.energy);
  const int h = options.h > 0 ? options.h : energy_dimension(row.values, options.energy);

  PcaStage stage;
  stage.mean = sample_mean(samples);
  stage.x_p = col.vectors.leftCols(g);
  stage.eigvals_col = col.values.head(g).cwiseMax(0.0);
  stage.z_p = row.vectors.leftCols(h).transpose();
  stage.eigvals_row = row.values.head(h).cwiseMax(0.0);
  return stage;
}

Matrix pca_project(const PcaStage& stage, const Matrix& a) {
  if (a.rows() != stage.m() || a.cols() != stage.n()) {
    std::ostringstream os;
    os << "sample is " << a.rows() << "x" << a.cols() << ", stage expects " << stage.m() << "x"
       << stage.n();
    throw Error(ErrorKind::kShapeMismatch, os.str());
  }
  return stage.z_p * a * stage.x_p;
}

}  // namespace facever
