// Copyright 2026 The facever Authors.
// SPDX-License-Identifier: Apache-2.0

#include "facever/csf.hpp"

#include "facever/discriminant.hpp"
#include "facever/error.hpp"
#include "facever/subspace.hpp"
#include "parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>

namespace facever {

namespace {

Eigen::Map<const Vector> vectorize(const Matrix& a) { return {a.data(), a.size()}; }

Vector direction_from_moments(const Matrix& moment, int n_total, const Vector& client_sum,
                              int n_client, const Vector& total_sum, double ridge,
                              const std::string& client_id, double& m_c, double& m_i) {
  const int n_imp = n_total - n_client;
  if (n_client < 1 || n_imp < 1)
    throw Error(ErrorKind::kInvalidArgument,
                "client '" + client_id + "' needs samples on both sides of the 2-class problem");
  const Vector mu_c = client_sum / n_client;
  const Vector mu_i = (total_sum - client_sum) / n_imp;
  const double scale = std::max({1.0, mu_c.norm(), mu_i.norm()});
  if (!((mu_c - mu_i).norm() > 1e-12 * scale))
    throw Error(ErrorKind::kDegenerateClient,
                "client '" + client_id + "' has the same mean as its impostors; it cannot be verified");

  Matrix s_w = moment - n_client * mu_c * mu_c.transpose() - n_imp * mu_i * mu_i.transpose();
  s_w /= n_total;
  const Eigen::LLT<Matrix> llt(regularized(SymMatrix::from_symmetric_part(s_w), ridge).entries());
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kSingularScatter,
                "within-class scatter for client '" + client_id + "' is singular after regularization");
  Matrix a = llt.solve(mu_c - mu_i);
  const double norm = a.norm();
  if (!(norm > 0.0))
    throw Error(ErrorKind::kDegenerateClient, "client '" + client_id + "' has no Fisher direction");
  a /= norm;
  canonicalize_signs(a);
  m_c = a.col(0).dot(mu_c);
  m_i = a.col(0).dot(mu_i);
  return a.col(0);
}

}  // namespace

Vector CsfStage::reduce(const Matrix& a) const {
  if (a.rows() != rows || a.cols() != cols)
    throw Error(ErrorKind::kShapeMismatch, "probe does not match the baseline's image shape");
  return basis.transpose() * (vectorize(a) - mean);
}

CsfStage fit_csf_stage(std::span<const Matrix> images, double energy) {
  const Matrix mean_img = sample_mean(images);
  const auto n = static_cast<Eigen::Index>(images.size());
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "baseline PCA needs at least two samples");

  CsfStage stage;
  stage.rows = mean_img.rows();
  stage.cols = mean_img.cols();
  stage.mean = vectorize(mean_img);
  Matrix centred(stage.mean.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) centred.col(i) = vectorize(images[static_cast<std::size_t>(i)]) - stage.mean;

  const Matrix gram = (centred.transpose() * centred) / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const Vector values = es.eigenvalues().reverse();
  const Matrix vectors = es.eigenvectors().rowwise().reverse();

  const double cutoff = 1e-10 * std::max(values.sum(), 0.0);
  Eigen::Index positive = 0;
  while (positive < values.size() && values(positive) > cutoff) ++positive;
  if (positive == 0) throw Error(ErrorKind::kDegenerateClient, "all training images are identical");
  const Eigen::Index p =
      std::min<Eigen::Index>(energy_dimension(values.head(positive), energy), positive);

  stage.basis.resize(stage.mean.size(), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    stage.basis.col(k) = centred * vectors.col(k);
    stage.basis.col(k).normalize();
  }
  canonicalize_signs(stage.basis);
  stage.eigvals = values.head(p);
  return stage;
}

Vector fisher_direction_2class(const Matrix& features, const std::vector<bool>& is_client, double ridge) {
  if (static_cast<std::size_t>(features.cols()) != is_client.size())
    throw Error(ErrorKind::kShapeMismatch, "one class label is needed per feature column");
  const Matrix moment = features * features.transpose();
  const Vector total = features.rowwise().sum();
  Vector client = Vector::Zero(features.rows());
  int n_client = 0;
  for (Eigen::Index i = 0; i < features.cols(); ++i)
    if (is_client[static_cast<std::size_t>(i)]) {
      client += features.col(i);
      ++n_client;
    }
  double m_c = 0.0, m_i = 0.0;
  return direction_from_moments(moment, static_cast<int>(features.cols()), client, n_client, total,
                                ridge, "client", m_c, m_i);
}

double CsfClient::project(const Matrix& a) const { return weights.dot(vectorize(a)) - offset; }

double CsfClient::score(const Matrix& a) const {
  const double y = project(a);
  return std::abs(y - m_i) - std::abs(y - m_c);
}

namespace {

struct ReducedSet {
  Matrix moment;
  Vector total;
  std::map<std::string, std::pair<Vector, int>> sums;
  int n = 0;
};

ReducedSet reduce_all(const CsfStage& stage, std::span<const Matrix> images,
                      std::span<const std::string> labels) {
  if (images.size() != labels.size())
    throw Error(ErrorKind::kShapeMismatch, "one label is needed per training image");
  Matrix f(stage.dim(), static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) f.col(static_cast<Eigen::Index>(i)) = stage.reduce(images[i]);
  ReducedSet r;
  r.moment = f * f.transpose();
  r.total = f.rowwise().sum();
  r.n = static_cast<int>(images.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = r.sums.try_emplace(labels[i], Vector::Zero(stage.dim()), 0);
    it->second.first += f.col(static_cast<Eigen::Index>(i));
    ++it->second.second;
  }
  return r;
}

CsfClient client_from_reduced(const CsfStage& stage, const ReducedSet& r, const std::string& id,
                              double ridge) {
  const auto it = r.sums.find(id);
  if (it == r.sums.end())
    throw Error(ErrorKind::kUnknownClient, "client '" + id + "' has no training samples");
  CsfClient c;
  c.client_id = id;
  c.direction = direction_from_moments(r.moment, r.n, it->second.first, it->second.second, r.total,
                                       ridge, id, c.m_c, c.m_i);
  c.weights = stage.basis * c.direction;
  c.offset = c.weights.dot(stage.mean);
  return c;
}

}  // namespace

CsfClient csf_client(const CsfStage& stage, std::span<const Matrix> images,
                     std::span<const std::string> labels, const std::string& client_id, double ridge) {
  return client_from_reduced(stage, reduce_all(stage, images, labels), client_id, ridge);
}

CsfModel train_csf(std::span<const Matrix> images, std::span<const std::string> labels, double energy,
                   double ridge, int threads) {
  CsfModel model;
  model.stage = fit_csf_stage(images, energy);
  const ReducedSet r = reduce_all(model.stage, images, labels);
  std::vector<std::string> ids;
  for (const auto& kv : r.sums) ids.push_back(kv.first);
  if (ids.size() < 2) throw Error(ErrorKind::kBadManifest, "training needs at least two clients");
  std::vector<CsfClient> built(ids.size());
  detail::parallel_for(ids.size(), threads,
                       [&](std::size_t i) { built[i] = client_from_reduced(model.stage, r, ids[i], ridge); });
  for (auto& c : built) model.clients.emplace(c.client_id, std::move(c));
  return model;
}

CsfClient csf_baseline(std::span<const Matrix> images, std::span<const std::string> labels,
                       const std::string& client_id, double energy, double ridge) {
  return csf_client(fit_csf_stage(images, energy), images, labels, client_id, ridge);
}

}  // namespace facever
