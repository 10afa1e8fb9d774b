// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/discriminant.hpp"

#include "facever/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace facever {

namespace {

constexpr double kZeroEigenvalue = 1e-10;

using StatsMap = std::map<std::string, detail::ClassStats>;

void check_labels(std::span<const Matrix> samples, std::span<const std::string> labels) {
  if (samples.size() != labels.size())
    throw Error(ErrorKind::kInvalidArgument, "one label is required per sample");
  if (samples.empty()) throw Error(ErrorKind::kInvalidArgument, "no training samples");
}

void accumulate(detail::ClassStats& st, const Matrix& centred) {
  if (st.count == 0) {
    st.proj_sum = Matrix::Zero(centred.rows(), centred.cols());
    st.col_moment = Matrix::Zero(centred.cols(), centred.cols());
    st.row_moment = Matrix::Zero(centred.rows(), centred.rows());
  }
  ++st.count;
  st.proj_sum += centred;
  st.col_moment.noalias() += centred.transpose() * centred;
  st.row_moment.noalias() += centred * centred.transpose();
}

ScatterSet scatters_from(const StatsMap& stats, const Matrix& centre, const std::string& client_id) {
  const auto it = stats.find(client_id);
  if (it == stats.end() || it->second.count == 0)
    throw Error(ErrorKind::kInvalidArgument, "client '" + client_id + "' has no training samples");
  if (stats.size() < 2)
    throw Error(ErrorKind::kInvalidArgument,
                "client '" + client_id + "' has no impostor samples to discriminate against");

  const detail::ClassStats& cl = it->second;
  const auto h = cl.proj_sum.rows();
  const auto g = cl.proj_sum.cols();

  int n_imp = 0;
  Matrix imp_sum = Matrix::Zero(h, g);
  Matrix imp_col = Matrix::Zero(g, g);
  Matrix imp_row = Matrix::Zero(h, h);
  for (const auto& [label, st] : stats) {
    if (label == client_id) continue;
    n_imp += st.count;
    imp_sum += st.proj_sum;
    imp_col += st.col_moment;
    imp_row += st.row_moment;
  }

  const Matrix mc = cl.proj_sum / cl.count;
  const Matrix mi = imp_sum / n_imp;
  const int n_total = cl.count + n_imp;

  Matrix col_w = (cl.col_moment - cl.count * mc.transpose() * mc) +
                 (imp_col - n_imp * mi.transpose() * mi);
  Matrix row_w = (cl.row_moment - cl.count * mc * mc.transpose()) +
                 (imp_row - n_imp * mi * mi.transpose());
  const Matrix diff = mc - mi;

  ScatterSet s;
  s.sc_w = SymMatrix::from_symmetric_part(col_w / n_total);
  s.sr_w = SymMatrix::from_symmetric_part(row_w / n_total);
  s.sc_b = SymMatrix::from_symmetric_part(diff.transpose() * diff);
  s.sr_b = SymMatrix::from_symmetric_part(diff * diff.transpose());
  s.client_mean = mc + centre;
  s.impostor_mean = mi + centre;
  s.n_client = cl.count;
  s.n_total = n_total;
  s.n_classes = static_cast<int>(stats.size());
  return s;
}

}  // namespace

std::string NonsingularityDiagnosis::describe() const {
  std::ostringstream os;
  os << "N=" << n_total << " D=" << n_classes << " g=" << g << " h=" << h
     << "; column condition N >= " << col_required << (col_condition ? " holds" : " fails")
     << ", row condition N >= " << row_required << (row_condition ? " holds" : " fails")
     << "; rank(SC_W)=" << sc_w_rank << ", rank(SR_W)=" << sr_w_rank
     << ", bound (N-D)*min(h,g)=" << rank_bound;
  return os.str();
}

NonsingularityDiagnosis nonsingularity_check(const ScatterSet& s) {
  NonsingularityDiagnosis d;
  d.n_total = s.n_total;
  d.n_classes = s.n_classes;
  d.g = static_cast<int>(s.sc_w.order());
  d.h = static_cast<int>(s.sr_w.order());
  const int mn = std::max(1, std::min(d.g, d.h));
  d.col_required = d.n_classes + static_cast<double>(d.g) / mn;
  d.row_required = d.n_classes + static_cast<double>(d.h) / mn;
  d.col_condition = d.n_total >= d.col_required;
  d.row_condition = d.n_total >= d.row_required;
  d.rank_bound = static_cast<long>(d.n_total - d.n_classes) * std::min(d.g, d.h);
  d.sc_w_rank = numerical_rank(s.sc_w);
  d.sr_w_rank = numerical_rank(s.sr_w);
  return d;
}

SymMatrix regularized(const SymMatrix& s_w, double ridge) {
  const auto order = s_w.order();
  Matrix reg = s_w.entries();
  if (order > 0 && ridge > 0.0) {
    const double shift = ridge * std::max(reg.trace(), 0.0) / static_cast<double>(order);
    reg.diagonal().array() += shift;
  }
  return SymMatrix::from_symmetric_part(reg);
}

FisherDirections fisher_directions(const SymMatrix& s_w, const SymMatrix& s_b, int k, double ridge) {
  const auto order = s_w.order();
  if (s_b.order() != order)
    throw Error(ErrorKind::kShapeMismatch, "within- and between-class scatters differ in order");
  if (k < 1 || k > order) {
    std::ostringstream os;
    os << "requested " << k << " discriminant directions in a space of order " << order;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (ridge < 0.0) throw Error(ErrorKind::kInvalidArgument, "ridge must be nonnegative");

  const Eigen::LLT<Matrix> llt(regularized(s_w, ridge).entries());
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kSingularScatter, "within-class scatter is singular after regularization");
  const auto l = llt.matrixL();

  // L^-1 S_b L^-T, using symmetry of S_b.
  const Matrix left = l.solve(s_b.entries());
  const Matrix whitened = l.solve(left.transpose());
  const EigenPairs e = top_eigvecs_sym(SymMatrix::from_symmetric_part(whitened), k);

  FisherDirections out;
  out.vectors = llt.matrixU().solve(e.vectors);
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    const double norm = out.vectors.col(j).norm();
    if (norm > 0.0) out.vectors.col(j) /= norm;
  }
  canonicalize_signs(out.vectors);
  out.values = e.values;
  for (Eigen::Index j = 0; j < out.values.size(); ++j)
    if (out.values(j) <= kZeroEigenvalue) ++out.padded;
  return out;
}

Matrix ClientTemplate::project(const Matrix& a) const {
  if (a.rows() != z.cols() || a.cols() != x.rows()) {
    std::ostringstream os;
    os << "probe is " << a.rows() << "x" << a.cols() << ", template expects " << z.cols() << "x"
       << x.rows();
    throw Error(ErrorKind::kShapeMismatch, os.str());
  }
  return z * a * x;
}

ScatterSet client_scatters(std::span<const Matrix> projected, std::span<const std::string> labels,
                           const std::string& client_id) {
  check_labels(projected, labels);
  const Matrix centre = sample_mean(projected);
  StatsMap stats;
  for (std::size_t i = 0; i < projected.size(); ++i)
    accumulate(stats[labels[i]], projected[i] - centre);
  return scatters_from(stats, centre, client_id);
}

DiscriminantTrainer::DiscriminantTrainer(const PcaStage& stage, std::span<const Matrix> images,
                                         std::span<const std::string> labels)
    : stage_(stage) {
  check_labels(images, labels);
  std::vector<Matrix> projected;
  projected.reserve(images.size());
  for (const Matrix& a : images) projected.push_back(pca_project(stage_, a));
  proj_centre_ = sample_mean(projected);
  for (std::size_t i = 0; i < images.size(); ++i) {
    detail::ClassStats& st = stats_[labels[i]];
    accumulate(st, projected[i] - proj_centre_);
    if (st.raw_sum.size() == 0) st.raw_sum = Matrix::Zero(images[i].rows(), images[i].cols());
    st.raw_sum += images[i];
  }
}

std::vector<std::string> DiscriminantTrainer::clients() const {
  std::vector<std::string> out;
  out.reserve(stats_.size());
  for (const auto& kv : stats_) out.push_back(kv.first);
  return out;
}

ScatterSet DiscriminantTrainer::scatters(const std::string& client_id) const {
  return scatters_from(stats_, proj_centre_, client_id);
}

ClientTemplate DiscriminantTrainer::build(const std::string& client_id,
                                          const TemplateOptions& options) const {
  const ScatterSet s = scatters(client_id);
  if (options.d < 1 || options.d > stage_.g() || options.q < 1 || options.q > stage_.h()) {
    std::ostringstream os;
    os << "template sizes q=" << options.q << ", d=" << options.d << " exceed h=" << stage_.h()
       << ", g=" << stage_.g();
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }

  FisherDirections col, row;
  try {
    col = fisher_directions(s.sc_w, s.sc_b, options.d, options.ridge);
    row = fisher_directions(s.sr_w, s.sr_b, options.q, options.ridge);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSingularScatter) throw;
    throw Error(ErrorKind::kSingularScatter, "client '" + client_id + "': " + e.what() + " (" +
                                                 nonsingularity_check(s).describe() + ")");
  }

  ClientTemplate t;
  t.client_id = client_id;
  t.x_f = col.vectors;
  t.z_f = row.vectors.transpose();
  t.col_values = col.values;
  t.row_values = row.values;
  t.x = stage_.x_p * t.x_f;
  t.z = t.z_f * stage_.z_p;

  // Project the raw class means through the composite projectors.
  const detail::ClassStats& cl = stats_.at(client_id);
  Matrix imp_raw = Matrix::Zero(cl.raw_sum.rows(), cl.raw_sum.cols());
  int n_imp = 0;
  for (const auto& [label, st] : stats_) {
    if (label == client_id) continue;
    imp_raw += st.raw_sum;
    n_imp += st.count;
  }
  t.m_c = t.z * (cl.raw_sum / cl.count) * t.x;
  t.m_i = t.z * (imp_raw / n_imp) * t.x;

  const double gap = (t.m_c - t.m_i).norm();
  const double scale = std::max({1.0, t.m_c.norm(), t.m_i.norm()});
  if (!(gap > 1e-12 * scale))
    throw Error(ErrorKind::kDegenerateClient,
                "client '" + client_id + "' projects onto the impostor mean; it cannot be verified");
  return t;
}

ClientTemplate build_client_template(const PcaStage& stage, std::span<const Matrix> images,
                                     std::span<const std::string> labels,
                                     const std::string& client_id, const TemplateOptions& options) {
  return DiscriminantTrainer(stage, images, labels).build(client_id, options);
}

}  // namespace facever
