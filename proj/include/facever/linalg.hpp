// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace facever {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Square real matrix that is symmetric by construction. The constructor
/// rejects inputs whose asymmetry exceeds 1e-12 relative to the Frobenius
/// norm and then stores the exact symmetric part.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& entries);

  /// Builds from a matrix known to be symmetric up to rounding (e.g. AᵀA),
  /// symmetrizing without the tolerance check.
  static SymMatrix from_symmetric_part(const Matrix& entries);

  Eigen::Index order() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

 private:
  Matrix entries_;
};

struct EigenPairs {
  Matrix vectors;  // order x k, orthonormal columns
  Vector values;   // k, descending
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Values are sorted descending (stable w.r.t. the diagonal position on ties),
/// and each eigenvector is signed so its largest-magnitude entry is positive.
EigenPairs jacobi_eigen(const SymMatrix& s);

/// Leading k eigenpairs of s.
EigenPairs top_eigvecs_sym(const SymMatrix& s, int k);

/// Flips the sign of each column so that its largest-magnitude entry is
/// positive. Ties on magnitude resolve to the lowest index.
void canonicalize_signs(Matrix& columns);

/// Number of eigenvalues above rel_tol * trace(s) (trace clamped at 0).
int numerical_rank(const SymMatrix& s, double rel_tol = 1e-10);

/// Row-major flattening helpers used by the model file and the baseline.
std::vector<double> to_row_major(const Matrix& m);
Matrix from_row_major(const std::vector<double>& data, Eigen::Index rows, Eigen::Index cols);

}  // namespace facever
