// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/linalg.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace facever {

/// Client-specific Fisherfaces baseline: images are vectorized, reduced by
/// ordinary PCA, and each client gets one 2-class Fisher direction.
struct CsfStage {
  Vector mean;     // m*n, column-major vectorization
  Matrix basis;    // (m*n) x p, orthonormal columns
  Vector eigvals;  // p, descending
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index dim() const { return basis.cols(); }
  /// Reduced feature Uᵀ(vec(a) - mean).
  Vector reduce(const Matrix& a) const;
};

/// PCA on vectorized images via the N x N Gram matrix. p is the smallest
/// dimension reaching `energy` of the spectrum, capped at N - 1.
CsfStage fit_csf_stage(std::span<const Matrix> images, double energy = 0.95);

/// a = (S_w + ridge)⁻¹ (mu_c - mu_i), unit length, largest entry positive.
/// Columns of `features` are samples; is_client marks the client's columns.
/// S_w pools the client and impostor classes and is divided by N.
Vector fisher_direction_2class(const Matrix& features, const std::vector<bool>& is_client,
                               double ridge = 1e-6);

struct CsfClient {
  std::string client_id;
  Vector direction;  // p
  Vector weights;    // m*n, basis * direction
  double offset = 0.0;  // weightsᵀ mean
  double m_c = 0.0;
  double m_i = 0.0;

  double project(const Matrix& a) const;
  /// |y - m_i| - |y - m_c|; larger is more client-like.
  double score(const Matrix& a) const;
};

struct CsfModel {
  CsfStage stage;
  std::map<std::string, CsfClient> clients;
};

/// One client's model given a fitted stage.
CsfClient csf_client(const CsfStage& stage, std::span<const Matrix> images,
                     std::span<const std::string> labels, const std::string& client_id,
                     double ridge = 1e-6);

/// Fits the stage on every image and one model for every distinct label.
CsfModel train_csf(std::span<const Matrix> images, std::span<const std::string> labels,
                   double energy = 0.95, double ridge = 1e-6, int threads = 1);

/// Stage plus a single client, fitted from the same training set.
CsfClient csf_baseline(std::span<const Matrix> images, std::span<const std::string> labels,
                       const std::string& client_id, double energy = 0.95, double ridge = 1e-6);

}  // namespace facever
