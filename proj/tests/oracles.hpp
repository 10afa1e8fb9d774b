// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used by the tests. They work on
// plain nested vectors with explicit loops and share no code with the
// library beyond the Eigen-to-grid conversion at the boundary.

#pragma once

#include "facever/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const facever::Matrix& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

inline Grid zeros(std::size_t rows, std::size_t cols) { return Grid(rows, std::vector<double>(cols, 0.0)); }

inline Grid mean_of(const std::vector<Grid>& xs) {
  Grid m = zeros(xs[0].size(), xs[0][0].size());
  for (const Grid& x : xs)
    for (std::size_t r = 0; r < m.size(); ++r)
      for (std::size_t c = 0; c < m[0].size(); ++c) m[r][c] += x[r][c] / static_cast<double>(xs.size());
  return m;
}

/// acc += (a - mu)^T (a - mu), entry by entry.
inline void add_col_outer(Grid& acc, const Grid& a, const Grid& mu) {
  const std::size_t rows = a.size(), cols = a[0].size();
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < rows; ++k) s += (a[k][i] - mu[k][i]) * (a[k][j] - mu[k][j]);
      acc[i][j] += s;
    }
}

/// acc += (a - mu)(a - mu)^T.
inline void add_row_outer(Grid& acc, const Grid& a, const Grid& mu) {
  const std::size_t rows = a.size(), cols = a[0].size();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < cols; ++k) s += (a[i][k] - mu[i][k]) * (a[j][k] - mu[j][k]);
      acc[i][j] += s;
    }
}

inline Grid scaled(Grid g, double f) {
  for (auto& row : g)
    for (double& v : row) v *= f;
  return g;
}

inline Grid column_total(const std::vector<Grid>& xs) {
  const Grid mu = mean_of(xs);
  Grid acc = zeros(xs[0][0].size(), xs[0][0].size());
  for (const Grid& x : xs) add_col_outer(acc, x, mu);
  return scaled(acc, 1.0 / static_cast<double>(xs.size()));
}

inline Grid row_total(const std::vector<Grid>& xs) {
  const Grid mu = mean_of(xs);
  Grid acc = zeros(xs[0].size(), xs[0].size());
  for (const Grid& x : xs) add_row_outer(acc, x, mu);
  return scaled(acc, 1.0 / static_cast<double>(xs.size()));
}

struct Scatters {
  Grid sc_w, sc_b, sr_w, sr_b;
};

/// Within-class terms pool the client's deviations from M_c and every other
/// sample's deviation from M_I; between-class terms are the outer products of
/// M_c - M_I.
inline Scatters client_scatters(const std::vector<Grid>& xs, const std::vector<std::string>& labels,
                                const std::string& client) {
  std::vector<Grid> own, other;
  for (std::size_t i = 0; i < xs.size(); ++i) (labels[i] == client ? own : other).push_back(xs[i]);
  const Grid mc = mean_of(own), mi = mean_of(other);
  const std::size_t h = xs[0].size(), g = xs[0][0].size();
  Scatters s{zeros(g, g), zeros(g, g), zeros(h, h), zeros(h, h)};
  for (const Grid& x : own) {
    add_col_outer(s.sc_w, x, mc);
    add_row_outer(s.sr_w, x, mc);
  }
  for (const Grid& x : other) {
    add_col_outer(s.sc_w, x, mi);
    add_row_outer(s.sr_w, x, mi);
  }
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  s.sc_w = scaled(s.sc_w, inv_n);
  s.sr_w = scaled(s.sr_w, inv_n);
  add_col_outer(s.sc_b, mc, mi);
  add_row_outer(s.sr_b, mc, mi);
  return s;
}

/// ||a - b||_F / max(||b||_F, 1e-300).
inline double rel_error(const facever::Matrix& a, const Grid& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < b.size(); ++r)
    for (std::size_t c = 0; c < b[0].size(); ++c) {
      const double d = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - b[r][c];
      num += d * d;
      den += b[r][c] * b[r][c];
    }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline double abs_error(const facever::Matrix& a, const Grid& b) {
  double num = 0.0;
  for (std::size_t r = 0; r < b.size(); ++r)
    for (std::size_t c = 0; c < b[0].size(); ++c) {
      const double d = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - b[r][c];
      num += d * d;
    }
  return std::sqrt(num);
}

/// z * a * x with scalar loops.
inline Grid triple_product(const Grid& z, const Grid& a, const Grid& x) {
  Grid za = zeros(z.size(), a[0].size());
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j)
      for (std::size_t k = 0; k < a.size(); ++k) za[i][j] += z[i][k] * a[k][j];
  Grid out = zeros(z.size(), x[0].size());
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < x[0].size(); ++j)
      for (std::size_t k = 0; k < x.size(); ++k) out[i][j] += za[i][k] * x[k][j];
  return out;
}

/// Eigenvalues of a symmetric 2x2 matrix, descending, from its characteristic
/// polynomial.
inline std::vector<double> eig2(double a, double b, double d) {
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {mid + rad, mid - rad};
}

/// Eigenvalues of a symmetric 3x3 matrix, descending, by the trigonometric
/// solution of its characteristic cubic.
inline std::vector<double> eig3(const Grid& s) {
  const double p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
  const double q = (s[0][0] + s[1][1] + s[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::vector<double> v{s[0][0], s[1][1], s[2][2]};
    std::sort(v.rbegin(), v.rend());
    return v;
  }
  const double p2 = (s[0][0] - q) * (s[0][0] - q) + (s[1][1] - q) * (s[1][1] - q) +
                    (s[2][2] - q) * (s[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Grid b = s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (s[i][j] - (i == j ? q : 0.0)) / p;
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                     b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e1, 3.0 * q - e1 - e3, e3};
}

struct SweepPoint {
  double threshold;
  long false_accepts;
  long false_rejects;
};

/// (false accepts, false rejects) at threshold t with accept iff score > t.
inline SweepPoint count_at(const std::vector<double>& gen, const std::vector<double>& imp, double t) {
  SweepPoint p{t, 0, 0};
  for (double s : imp)
    if (s > t) ++p.false_accepts;
  for (double s : gen)
    if (!(s > t)) ++p.false_rejects;
  return p;
}

/// |FAR - FRR| scaled by (#genuine * #impostor), exact in integers.
inline long scaled_gap(const SweepPoint& p, std::size_t n_gen, std::size_t n_imp) {
  return std::labs(p.false_accepts * static_cast<long>(n_gen) - p.false_rejects * static_cast<long>(n_imp));
}

/// Smallest scaled |FAR - FRR| over every threshold that can change a
/// verdict: each score, the largest double below each score, and minus
/// infinity.
inline long best_scaled_gap(const std::vector<double>& gen, const std::vector<double>& imp) {
  std::vector<double> ts{-std::numeric_limits<double>::infinity()};
  for (const auto* set : {&gen, &imp})
    for (double s : *set) {
      ts.push_back(s);
      ts.push_back(std::nextafter(s, -std::numeric_limits<double>::infinity()));
    }
  long best = std::numeric_limits<long>::max();
  for (double t : ts) best = std::min(best, scaled_gap(count_at(gen, imp, t), gen.size(), imp.size()));
  return best;
}

inline facever::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  facever::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

inline facever::Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index order) {
  const facever::Matrix a = random_matrix(rng, order, order);
  return 0.5 * (a + a.transpose());
}

}  // namespace oracle
