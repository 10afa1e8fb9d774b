// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/discriminant.hpp"
#include "facever/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace facever;

namespace {

struct Labeled {
  std::vector<Matrix> xs;
  std::vector<std::string> labels;
};

Labeled random_labeled(std::mt19937_64& rng, int classes, int per_class, Eigen::Index m, Eigen::Index n) {
  Labeled out;
  for (int c = 0; c < classes; ++c) {
    const Matrix centre = oracle::random_matrix(rng, m, n, -2.0, 2.0);
    for (int k = 0; k < per_class; ++k) {
      out.xs.push_back(centre + oracle::random_matrix(rng, m, n));
      out.labels.push_back("s" + std::to_string(c));
    }
  }
  return out;
}

std::vector<oracle::Grid> grids(const std::vector<Matrix>& xs) {
  std::vector<oracle::Grid> out;
  for (const Matrix& x : xs) out.push_back(oracle::to_grid(x));
  return out;
}

void check_against_oracle(const Labeled& d, const std::string& client, double tol) {
  const ScatterSet s = client_scatters(d.xs, d.labels, client);
  const oracle::Scatters o = oracle::client_scatters(grids(d.xs), d.labels, client);
  CHECK(oracle::rel_error(s.sc_w.entries(), o.sc_w) <= tol);
  CHECK(oracle::rel_error(s.sc_b.entries(), o.sc_b) <= tol);
  CHECK(oracle::rel_error(s.sr_w.entries(), o.sr_w) <= tol);
  CHECK(oracle::rel_error(s.sr_b.entries(), o.sr_b) <= tol);
}

}  // namespace

TEST_SUITE("discriminant") {

TEST_CASE("identical samples give zero scatters") {
  const std::vector<Matrix> xs(4, Matrix::Constant(2, 3, 1.5));
  const std::vector<std::string> labels{"a", "a", "b", "b"};
  const ScatterSet s = client_scatters(xs, labels, "a");
  CHECK(s.sc_w.entries().norm() == 0.0);
  CHECK(s.sc_b.entries().norm() == 0.0);
  CHECK(s.sr_w.entries().norm() == 0.0);
  CHECK(s.sr_b.entries().norm() == 0.0);
}

TEST_CASE("one scalar sample per side") {
  const std::vector<Matrix> xs{Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, -1.5)};
  const std::vector<std::string> labels{"c", "i"};
  const ScatterSet s = client_scatters(xs, labels, "c");
  CHECK(std::abs(s.sc_w(0, 0)) <= 1e-15);
  CHECK(s.sc_b(0, 0) == doctest::Approx(20.25));
  CHECK(s.sr_b(0, 0) == doctest::Approx(20.25));
}

TEST_CASE("three clients with integer entries match the loop oracle") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> u(-5, 5);
  Labeled d;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < 2; ++k) {
      Matrix x(2, 2);
      for (int i = 0; i < 4; ++i) x(i / 2, i % 2) = u(rng);
      d.xs.push_back(x);
      d.labels.push_back("s" + std::to_string(c));
    }
  for (const char* c : {"s0", "s1", "s2"}) check_against_oracle(d, c, 1e-12);
}

TEST_CASE("random five-client sets match the loop oracle") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const Labeled d = random_labeled(rng, 5, 4, 6, 5);
    check_against_oracle(d, "s" + std::to_string(trial % 5), 1e-10);
  }
}

TEST_CASE("missing client or impostor samples are rejected") {
  const std::vector<Matrix> xs(2, Matrix::Zero(2, 2));
  const std::vector<std::string> same{"a", "a"};
  CHECK_THROWS_AS(client_scatters(xs, same, "a"), Error);
  CHECK_THROWS_AS(client_scatters(xs, same, "b"), Error);
}

TEST_CASE("between-class rank follows the mean difference") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Labeled d = random_labeled(rng, 4, 3, 5, 4);
    const ScatterSet s = client_scatters(d.xs, d.labels, "s1");
    const Matrix gap = s.client_mean - s.impostor_mean;
    const int r = numerical_rank(SymMatrix::from_symmetric_part(gap.transpose() * gap));
    CHECK(numerical_rank(s.sc_b) == r);
    CHECK(numerical_rank(s.sr_b) == r);
    CHECK(r <= 4);
  }
  const Matrix u = oracle::random_matrix(rng, 5, 1), v = oracle::random_matrix(rng, 4, 1);
  const std::vector<Matrix> xs{u * v.transpose(), -u * v.transpose(), Matrix::Zero(5, 4)};
  const std::vector<std::string> labels{"a", "b", "b"};
  const ScatterSet s = client_scatters(xs, labels, "a");
  CHECK(numerical_rank(s.sc_b) == 1);
  CHECK(numerical_rank(s.sr_b) == 1);
}

TEST_CASE("nonsingularity diagnosis") {
  ScatterSet s;
  s.sc_w = SymMatrix(Matrix::Identity(10, 10));
  s.sr_w = SymMatrix(Matrix::Identity(10, 10));
  s.sc_b = s.sc_w;
  s.sr_b = s.sr_w;
  s.n_total = 600;
  s.n_classes = 200;
  const NonsingularityDiagnosis d = nonsingularity_check(s);
  CHECK(d.col_required == doctest::Approx(201.0));
  CHECK(d.col_condition);
  CHECK(d.row_condition);
  CHECK(d.rank_bound == 4000);
  CHECK(d.sc_w_rank == 10);
  CHECK(!d.describe().empty());
}

TEST_CASE("one sample per class fails the condition and has zero within-class rank") {
  std::mt19937_64 rng(34);
  const Labeled d = random_labeled(rng, 2, 1, 4, 3);
  const ScatterSet s = client_scatters(d.xs, d.labels, "s0");
  const NonsingularityDiagnosis diag = nonsingularity_check(s);
  CHECK(!diag.col_condition);
  CHECK(!diag.row_condition);
  CHECK(diag.sc_w_rank == 0);
  CHECK(diag.sr_w_rank == 0);
  CHECK(diag.rank_bound == 0);
}

TEST_CASE("identity within-class scatter reduces to the ordinary eigenproblem") {
  std::mt19937_64 rng(35);
  const Matrix b = oracle::random_matrix(rng, 4, 4);
  const SymMatrix sb = SymMatrix::from_symmetric_part(b * b.transpose());
  const FisherDirections f = fisher_directions(SymMatrix(Matrix::Identity(4, 4)), sb, 2, 0.0);
  const EigenPairs e = top_eigvecs_sym(sb, 2);
  CHECK((f.values - e.values).norm() <= 1e-10);
  CHECK((f.vectors - e.vectors).norm() <= 1e-8);
}

TEST_CASE("two by two generalized problem") {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = 4.0;
  w(1, 1) = 1.0;
  const FisherDirections f =
      fisher_directions(SymMatrix(w), SymMatrix(Matrix::Identity(2, 2)), 1, 0.0);
  CHECK(f.values(0) == doctest::Approx(1.0));
  CHECK(std::abs(f.vectors(0, 0)) <= 1e-12);
  CHECK(f.vectors(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("rank-one between scatter pads extra directions") {
  Vector u(3);
  u << 1, 2, -1;
  const FisherDirections f = fisher_directions(SymMatrix(Matrix::Identity(3, 3)),
                                               SymMatrix::from_symmetric_part(u * u.transpose()), 3);
  CHECK(f.values(0) > 1e-10);
  CHECK(f.padded == 2);
}

TEST_CASE("generalized residual on random PSD pairs") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index order = 2 + trial % 6;
    const Matrix a = oracle::random_matrix(rng, order, order + 2);
    const Matrix b = oracle::random_matrix(rng, order, 2);
    const SymMatrix sw = SymMatrix::from_symmetric_part(a * a.transpose());
    const SymMatrix sb = SymMatrix::from_symmetric_part(b * b.transpose());
    const FisherDirections f = fisher_directions(sw, sb, static_cast<int>(order));
    const Matrix wr = regularized(sw, 1e-6).entries();
    for (Eigen::Index j = 0; j < order; ++j) {
      const Vector v = f.vectors.col(j);
      CHECK((sb.entries() * v - f.values(j) * wr * v).norm() <= 1e-6 * (1.0 + sb.entries().norm()));
      CHECK(v.norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("a zero within-class scatter without ridge is singular") {
  try {
    fisher_directions(SymMatrix(Matrix::Zero(2, 2)), SymMatrix(Matrix::Identity(2, 2)), 1, 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingularScatter);
  }
}

TEST_CASE("template composition equals the two-stage projection") {
  std::mt19937_64 rng(37);
  const Labeled d = random_labeled(rng, 5, 4, 8, 7);
  const PcaStage st = fit_pca_stage(d.xs);
  const DiscriminantTrainer trainer(st, d.xs, d.labels);
  TemplateOptions opt;
  opt.q = std::min<int>(2, static_cast<int>(st.h()));
  opt.d = std::min<int>(2, static_cast<int>(st.g()));
  const ClientTemplate t = trainer.build("s2", opt);
  for (const Matrix& a : d.xs) {
    const Matrix two = t.z_f * pca_project(st, a) * t.x_f;
    CHECK((two - t.project(a)).norm() <= 1e-10);
  }
  std::vector<Matrix> projected;
  for (const Matrix& a : d.xs) projected.push_back(pca_project(st, a));
  const ScatterSet s = client_scatters(projected, d.labels, "s2");
  CHECK((t.m_c - t.z_f * s.client_mean * t.x_f).norm() <= 1e-10);
  CHECK((t.m_i - t.z_f * s.impostor_mean * t.x_f).norm() <= 1e-10);
}

TEST_CASE("sufficient statistics agree with direct scatters") {
  std::mt19937_64 rng(38);
  const Labeled d = random_labeled(rng, 4, 3, 7, 6);
  const PcaStage st = fit_pca_stage(d.xs);
  const DiscriminantTrainer trainer(st, d.xs, d.labels);
  std::vector<Matrix> projected;
  for (const Matrix& a : d.xs) projected.push_back(pca_project(st, a));
  for (const std::string& c : trainer.clients()) {
    const ScatterSet a = trainer.scatters(c), b = client_scatters(projected, d.labels, c);
    CHECK((a.sc_w.entries() - b.sc_w.entries()).norm() <= 1e-10 * (1.0 + b.sc_w.entries().norm()));
    CHECK((a.sr_w.entries() - b.sr_w.entries()).norm() <= 1e-10 * (1.0 + b.sr_w.entries().norm()));
    CHECK((a.sc_b.entries() - b.sc_b.entries()).norm() <= 1e-10 * (1.0 + b.sc_b.entries().norm()));
    CHECK((a.client_mean - b.client_mean).norm() <= 1e-10 * (1.0 + b.client_mean.norm()));
  }
}

TEST_CASE("default template projects to a number") {
  std::mt19937_64 rng(39);
  const Labeled d = random_labeled(rng, 3, 4, 6, 5);
  const PcaStage st = fit_pca_stage(d.xs);
  const ClientTemplate t = build_client_template(st, d.xs, d.labels, "s0");
  CHECK(t.q() == 1);
  CHECK(t.d() == 1);
  CHECK(t.project(d.xs[0]).size() == 1);
  CHECK(t.z.rows() == 1);
  CHECK(t.z.cols() == 6);
  CHECK(t.x.rows() == 5);
}

TEST_CASE("opposite rank-one offsets separate the projected means") {
  std::mt19937_64 rng(40);
  const Matrix mean = oracle::random_matrix(rng, 6, 5);
  const Vector u = oracle::random_matrix(rng, 6, 1), v = oracle::random_matrix(rng, 5, 1);
  Labeled d;
  for (int k = 0; k < 4; ++k) {
    const double c = 1.0 + 0.1 * k;
    d.xs.push_back(mean + c * u * v.transpose() + 0.01 * oracle::random_matrix(rng, 6, 5));
    d.labels.push_back("client");
    d.xs.push_back(mean - c * u * v.transpose() + 0.01 * oracle::random_matrix(rng, 6, 5));
    d.labels.push_back("other");
  }
  const PcaStage st = fit_pca_stage(d.xs);
  const ClientTemplate t = build_client_template(st, d.xs, d.labels, "client");
  CHECK((t.m_c - t.m_i).norm() > 0.0);
  for (std::size_t i = 0; i < d.xs.size(); ++i) {
    if (d.labels[i] != "client") continue;
    const Matrix y = t.project(d.xs[i]);
    CHECK((y - t.m_c).norm() < (y - t.m_i).norm());
  }
}

TEST_CASE("a client at the impostor mean is degenerate") {
  const Matrix a = Matrix::Constant(3, 3, 1.0);
  Matrix b = a, c = a;
  b(0, 0) += 1.0;
  c(0, 0) -= 1.0;
  const std::vector<Matrix> xs{a, b, c};
  const std::vector<std::string> labels{"x", "y", "y"};
  PcaStage st = fit_pca_stage(xs);
  try {
    build_client_template(st, xs, labels, "x");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateClient);
  }
}

TEST_CASE("a common translation leaves the mean gap unchanged") {
  std::mt19937_64 rng(41);
  Labeled d = random_labeled(rng, 4, 3, 6, 5);
  const PcaStage st = fit_pca_stage(d.xs);
  const ClientTemplate before = build_client_template(st, d.xs, d.labels, "s1");
  const Matrix k = oracle::random_matrix(rng, 6, 5, -3.0, 3.0);
  for (Matrix& x : d.xs) x += k;
  const PcaStage st2 = fit_pca_stage(d.xs);
  const ClientTemplate after = build_client_template(st2, d.xs, d.labels, "s1");
  CHECK(((before.m_c - before.m_i) - (after.m_c - after.m_i)).norm() <=
        1e-9 * (1.0 + (before.m_c - before.m_i).norm()));
}

TEST_CASE("client order does not change a template") {
  std::mt19937_64 rng(42);
  Labeled d = random_labeled(rng, 4, 3, 6, 5);
  const PcaStage st = fit_pca_stage(d.xs);
  const ClientTemplate a = build_client_template(st, d.xs, d.labels, "s2");
  std::reverse(d.xs.begin(), d.xs.end());
  std::reverse(d.labels.begin(), d.labels.end());
  const ClientTemplate b = build_client_template(st, d.xs, d.labels, "s2");
  CHECK((a.z - b.z).norm() <= 1e-10);
  CHECK((a.x - b.x).norm() <= 1e-10);
  CHECK((a.m_c - b.m_c).norm() <= 1e-10);
}

}
