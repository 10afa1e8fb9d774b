// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/linalg.hpp"

#include <span>

namespace facever {

/// Shared first stage of the two-directional projection: one column-space
/// projector (n x g) and one row-space projector (h x m) fitted to the total
/// scatter of every training image.
struct PcaStage {
  Matrix x_p;          // n x g, orthonormal columns
  Matrix z_p;          // h x m, orthonormal rows
  Matrix mean;         // m x n grand mean
  Vector eigvals_col;  // g, descending
  Vector eigvals_row;  // h, descending

  Eigen::Index m() const { return mean.rows(); }
  Eigen::Index n() const { return mean.cols(); }
  Eigen::Index g() const { return x_p.cols(); }
  Eigen::Index h() const { return z_p.rows(); }
};

struct PcaOptions {
  int g = 0;  // 0 selects by energy
  int h = 0;  // 0 selects by energy
  double energy = 0.95;

  bool operator==(const PcaOptions&) const = default;
};

/// (1/N) sum_i (A_i - mean)^T (A_i - mean), an n x n matrix.
SymMatrix column_total_scatter(std::span<const Matrix> samples);

/// (1/N) sum_i (A_i - mean)(A_i - mean)^T, an m x m matrix.
SymMatrix row_total_scatter(std::span<const Matrix> samples);

/// Elementwise mean; throws on an empty or ragged sequence.
Matrix sample_mean(std::span<const Matrix> samples);

/// Smallest k whose leading eigenvalues reach `energy` of the total
/// (negative eigenvalues count as zero). Returns 1 for an all-zero spectrum.
int energy_dimension(const Vector& descending_values, double energy);

PcaStage fit_pca_stage(std::span<const Matrix> samples, const PcaOptions& options = {});

/// W = Z_p A X_p. The raw sample is projected; no mean is removed.
Matrix pca_project(const PcaStage& stage, const Matrix& a);

}  // namespace facever
