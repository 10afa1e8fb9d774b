// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "facever/linalg.hpp"
#include "facever/subspace.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace facever {

/// Two-class scatters for one claimed identity: the client against everyone
/// else, in both matrix directions. Means are in the projected (h x g) space.
struct ScatterSet {
  SymMatrix sc_w;  // g x g
  SymMatrix sc_b;  // g x g
  SymMatrix sr_w;  // h x h
  SymMatrix sr_b;  // h x h
  Matrix client_mean;    // h x g
  Matrix impostor_mean;  // h x g
  int n_client = 0;
  int n_total = 0;
  int n_classes = 0;
};

/// Outcome of the nonsingularity guard for the within-class scatters.
struct NonsingularityDiagnosis {
  int n_total = 0;
  int n_classes = 0;
  int g = 0;
  int h = 0;
  double col_required = 0.0;  // D + g / min(h, g)
  double row_required = 0.0;  // D + h / min(h, g)
  bool col_condition = false;
  bool row_condition = false;
  long rank_bound = 0;  // (N - D) * min(h, g)
  int sc_w_rank = 0;
  int sr_w_rank = 0;

  std::string describe() const;
};

NonsingularityDiagnosis nonsingularity_check(const ScatterSet& s);

struct FisherDirections {
  Matrix vectors;  // order x k, unit columns
  Vector values;   // k, descending
  /// Returned directions whose generalized eigenvalue is <= 1e-10; they
  /// carry no discriminative information.
  int padded = 0;
};

/// Leading k solutions of s_b v = lambda s_w v, solved by whitening with the
/// Cholesky factor of s_w + ridge * trace(s_w) / order * I.
FisherDirections fisher_directions(const SymMatrix& s_w, const SymMatrix& s_b, int k,
                                   double ridge = 1e-6);

/// s_w with the scaled ridge applied, exactly as fisher_directions sees it.
SymMatrix regularized(const SymMatrix& s_w, double ridge);

struct TemplateOptions {
  int q = 1;
  int d = 1;
  double ridge = 1e-6;

  bool operator==(const TemplateOptions&) const = default;
};

/// Per-client discriminant template: composite projectors and the projected
/// class means.
struct ClientTemplate {
  std::string client_id;
  Matrix z;    // q x m  (= Z_F Z_p)
  Matrix x;    // n x d  (= X_p X_F)
  Matrix z_f;  // q x h
  Matrix x_f;  // g x d
  Matrix m_c;  // q x d
  Matrix m_i;  // q x d
  Vector row_values;  // q generalized eigenvalues
  Vector col_values;  // d generalized eigenvalues

  Eigen::Index q() const { return z.rows(); }
  Eigen::Index d() const { return x.cols(); }

  /// Y = Z A X.
  Matrix project(const Matrix& a) const;
};

/// Direct evaluation of the two-class scatters from labelled projected
/// samples. Throws when the client or the impostor class is empty.
ScatterSet client_scatters(std::span<const Matrix> projected, std::span<const std::string> labels,
                           const std::string& client_id);

namespace detail {

struct ClassStats {
  int count = 0;
  Matrix raw_sum;     // m x n (empty when built from projected samples only)
  Matrix proj_sum;    // h x g, centred at the projected grand mean
  Matrix col_moment;  // g x g
  Matrix row_moment;  // h x h
};

}  // namespace detail

/// Builds templates for many clients against one shared PCA stage. Sufficient
/// statistics per class are computed once so that each template costs
/// O(D g^2 h) instead of a pass over every sample.
class DiscriminantTrainer {
 public:
  DiscriminantTrainer(const PcaStage& stage, std::span<const Matrix> images,
                      std::span<const std::string> labels);

  const PcaStage& stage() const { return stage_; }
  std::vector<std::string> clients() const;

  ScatterSet scatters(const std::string& client_id) const;
  ClientTemplate build(const std::string& client_id, const TemplateOptions& options) const;

 private:
  PcaStage stage_;
  Matrix proj_centre_;
  std::map<std::string, detail::ClassStats> stats_;
};

ClientTemplate build_client_template(const PcaStage& stage, std::span<const Matrix> images,
                                     std::span<const std::string> labels,
                                     const std::string& client_id,
                                     const TemplateOptions& options = {});

}  // namespace facever
