// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/linalg.hpp"

#include "facever/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace facever {

namespace {

constexpr int kMaxSweeps = 50;
constexpr double kOffDiagonalTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-12;

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (r != c) sum += a(r, c) * a(r, c);
  return std::sqrt(sum);
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols()) {
    std::ostringstream os;
    os << "symmetric matrix must be square, got " << entries.rows() << "x" << entries.cols();
    throw Error(ErrorKind::kShapeMismatch, os.str());
  }
  if (!entries.allFinite())
    throw Error(ErrorKind::kInvalidArgument, "symmetric matrix has non-finite entries");
  const double scale = std::max(1.0, entries.norm());
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (entries.size() > 0 && asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "matrix is not symmetric (max |a_ij - a_ji| = " << asym << ")";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  entries_ = 0.5 * (entries + entries.transpose());
}

SymMatrix SymMatrix::from_symmetric_part(const Matrix& entries) {
  if (entries.rows() != entries.cols())
    throw Error(ErrorKind::kShapeMismatch, "symmetric matrix must be square");
  SymMatrix s;
  s.entries_ = 0.5 * (entries + entries.transpose());
  return s;
}

EigenPairs jacobi_eigen(const SymMatrix& s) {
  const Eigen::Index n = s.order();
  Matrix a = s.entries();
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();

  if (norm > 0.0) {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      if (off_diagonal_norm(a) <= kOffDiagonalTolerance * norm) break;
      for (Eigen::Index p = 0; p + 1 < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          double t;
          if (std::abs(theta) > 1e150) {
            t = 0.5 / theta;
          } else {
            t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          }
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;

          for (Eigen::Index k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = c * akp - sn * akq;
            a(k, q) = sn * akp + c * akq;
          }
          for (Eigen::Index k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(q, k);
            a(p, k) = c * apk - sn * aqk;
            a(q, k) = sn * apk + c * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - sn * vkq;
            v(k, q) = sn * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EigenPairs out;
  out.vectors.resize(n, n);
  out.values.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = a(order[j], order[j]);
    out.vectors.col(j) = v.col(order[j]);
  }
  canonicalize_signs(out.vectors);
  return out;
}

EigenPairs top_eigvecs_sym(const SymMatrix& s, int k) {
  if (k < 1 || k > s.order()) {
    std::ostringstream os;
    os << "requested " << k << " eigenvectors from a matrix of order " << s.order();
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  EigenPairs full = jacobi_eigen(s);
  EigenPairs out;
  out.vectors = full.vectors.leftCols(k);
  out.values = full.values.head(k);
  return out;
}

void canonicalize_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double mag = std::abs(columns(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) columns.col(j) *= -1.0;
  }
}

int numerical_rank(const SymMatrix& s, double rel_tol) {
  const double trace = s.entries().trace();
  if (!(trace > 0.0)) return 0;
  const EigenPairs e = jacobi_eigen(s);
  const double cut = rel_tol * trace;
  int rank = 0;
  for (Eigen::Index j = 0; j < e.values.size(); ++j)
    if (e.values(j) > cut) ++rank;
  return rank;
}

std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Matrix from_row_major(const std::vector<double>& data, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw Error(ErrorKind::kShapeMismatch, "row-major payload size does not match dimensions");
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++];
  return m;
}

}  // namespace facever
