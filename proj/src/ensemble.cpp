#include "paramred/ensemble.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "paramred/csv.hpp"
#include "paramred/errors.hpp"
#include "paramred/kernels.hpp"

namespace paramred {

namespace {

void require_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw InputError(what + ": non-finite entries");
}

}  // namespace

// ---- SampledMeasure ----------------------------------------------------

SampledMeasure::SampledMeasure(std::vector<ParameterPoint> points,
                               Eigen::VectorXd weights, bool probability)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      probability_(probability) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (n < 1) throw InputError("measure: needs at least one sample");
  if (weights_.size() != n)
    throw InputError("measure: " + std::to_string(points_.size()) +
                     " points but " + std::to_string(weights_.size()) +
                     " weights");
  const std::size_t coord_dim = points_.front().coords.size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].coords.size() != coord_dim)
      throw InputError("measure: point " + std::to_string(i) +
                       " has inconsistent coordinate count");
    for (double c : points_[i].coords)
      if (!std::isfinite(c))
        throw InputError("measure: point " + std::to_string(i) +
                         " has a non-finite coordinate");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw InputError("measure: weight " + std::to_string(i) +
                       " is not a positive finite number");
  }
  if (probability_) {
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > 1e-12)
      throw InputError("measure: flagged probability but weights sum to " +
                       std::to_string(total));
  }
}

SampledMeasure SampledMeasure::uniform(std::vector<ParameterPoint> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 1) throw InputError("measure: needs at least one sample");
  return SampledMeasure(std::move(points),
                        Eigen::VectorXd::Constant(n, 1.0 / double(n)));
}

SampledMeasure SampledMeasure::uniform_indexed(Eigen::Index n) {
  std::vector<ParameterPoint> points;
  points.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    points.push_back(ParameterPoint{{double(i)}, ""});
  return uniform(std::move(points));
}

const ParameterPoint& SampledMeasure::point(Eigen::Index i) const {
  if (i < 0 || i >= size())
    throw InputError("measure: point index out of range");
  return points_[static_cast<std::size_t>(i)];
}

Eigen::VectorXd SampledMeasure::sqrt_weights() const {
  return weights_.array().sqrt();
}

double SampledMeasure::q_inner(const Eigen::VectorXd& phi,
                               const Eigen::VectorXd& psi) const {
  if (phi.size() != size() || psi.size() != size())
    throw InputError("q_inner: size mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i)
    acc += weights_[i] * (phi[i] * psi[i]);
  return acc;
}

bool SampledMeasure::same_samples(const SampledMeasure& other) const {
  if (size() != other.size()) return false;
  if (weights_ != other.weights_) return false;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].coords != other.points_[i].coords) return false;
  return true;
}

// ---- SnapshotEnsemble --------------------------------------------------

SnapshotEnsemble::SnapshotEnsemble(Eigen::MatrixXd data,
                                   SampledMeasure measure)
    : data_(std::move(data)), measure_(std::move(measure)) {
  if (data_.rows() < 1) throw InputError("ensemble: state dimension is zero");
  if (data_.cols() != measure_.size())
    throw InputError("ensemble: " + std::to_string(data_.cols()) +
                     " snapshots but measure has " +
                     std::to_string(measure_.size()) + " samples");
  require_finite(data_, "ensemble");
}

Eigen::VectorXd SnapshotEnsemble::snapshot(Eigen::Index i) const {
  if (i < 0 || i >= sample_count())
    throw InputError("ensemble: snapshot index out of range");
  return data_.col(i);
}

// ---- CorrelationMatrix -------------------------------------------------

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw InputError("correlation: matrix is not square");
  require_finite(entries_, "correlation");
  const double scale = entries_.cwiseAbs().maxCoeff();
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300))
    throw InputError("correlation: matrix is not symmetric");
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_,
                                                    Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min < -1e-12 * std::max(lambda_max, 1e-300))
    throw NotPsdError("correlation: not positive semidefinite (min eigenvalue " +
                      std::to_string(lambda_min) + ")");
}

// ---- Operations ----------------------------------------------------------

CorrelationMatrix assemble_correlation(const SnapshotEnsemble& ens) {
  Eigen::MatrixXd c =
      kernels::weighted_outer_sum(ens.data(), ens.measure().weights());
  // weighted_outer_sum returns an exactly symmetric matrix, so the required
  // (C + C^T)/2 symmetrization is the identity here; CorrelationMatrix
  // still applies it.
  return CorrelationMatrix(std::move(c));
}

Eigen::VectorXd apply_R(const SnapshotEnsemble& ens, const Eigen::VectorXd& u) {
  if (u.size() != ens.state_dim())
    throw InputError("apply_R: vector has length " + std::to_string(u.size()) +
                     ", state dimension is " + std::to_string(ens.state_dim()));
  if (!u.allFinite()) throw InputError("apply_R: non-finite input");
  return kernels::matvec_transposed(ens.data(), u);
}

Eigen::VectorXd apply_R_adjoint(const SnapshotEnsemble& ens,
                                const Eigen::VectorXd& phi) {
  if (phi.size() != ens.sample_count())
    throw InputError("apply_R_adjoint: function has length " +
                     std::to_string(phi.size()) + ", sample count is " +
                     std::to_string(ens.sample_count()));
  if (!phi.allFinite()) throw InputError("apply_R_adjoint: non-finite input");
  return kernels::weighted_combination(ens.data(), ens.measure().weights(),
                                       phi);
}

// ---- Loading -------------------------------------------------------------

SampledMeasure load_measure(const std::filesystem::path& params_path,
                            const LoadOptions& options) {
  const auto rows = read_csv(params_path);
  const std::size_t n_cols = rows.front().size();
  if (options.weight_column && n_cols < 1)
    throw InputError("params: weight column requested but file has no columns");

  const std::size_t coord_cols = options.weight_column ? n_cols - 1 : n_cols;
  std::vector<ParameterPoint> points;
  points.reserve(rows.size());
  Eigen::VectorXd weights(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.push_back(
        ParameterPoint{{rows[i].begin(), rows[i].begin() + coord_cols}, ""});
    if (options.weight_column) {
      const double w = rows[i].back();
      if (!(w > 0.0))
        throw InputError("params: row " + std::to_string(i + 1) +
                         ": non-positive weight " + std::to_string(w));
      weights[static_cast<Eigen::Index>(i)] = w;
    } else {
      weights[static_cast<Eigen::Index>(i)] = 1.0 / double(rows.size());
    }
  }
  bool probability = false;
  if (options.probability_normalize) {
    weights /= weights.sum();
    probability = true;
  }
  return SampledMeasure(std::move(points), std::move(weights), probability);
}

SnapshotEnsemble load_ensemble(const std::filesystem::path& snapshot_path,
                               const std::filesystem::path& params_path,
                               const LoadOptions& options) {
  Eigen::MatrixXd data = read_csv_matrix(snapshot_path);
  SampledMeasure measure = load_measure(params_path, options);
  if (data.cols() != measure.size())
    throw InputError("ensemble: snapshot file has " +
                     std::to_string(data.cols()) + " columns but " +
                     params_path.string() + " has " +
                     std::to_string(measure.size()) + " rows");
  return SnapshotEnsemble(std::move(data), std::move(measure));
}

}  // namespace paramred
