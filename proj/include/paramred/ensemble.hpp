#ifndef PARAMRED_ENSEMBLE_HPP
#define PARAMRED_ENSEMBLE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace paramred {

/// One parameter value mu. Coordinates are opaque reals; the library never
/// interprets them.
struct ParameterPoint {
  std::vector<double> coords;
  std::string label;
};

/// Parameter samples mu_i with positive quadrature/probability weights w_i,
/// the discretisation of the measure on the parameter set.
class SampledMeasure {
 public:
  SampledMeasure(std::vector<ParameterPoint> points, Eigen::VectorXd weights,
                 bool probability = false);

  /// Uniform weights 1/N, the default when no weight column is given.
  static SampledMeasure uniform(std::vector<ParameterPoint> points);

  /// N index-labelled points with uniform weights, for data without
  /// parameter coordinates.
  static SampledMeasure uniform_indexed(Eigen::Index n);

  Eigen::Index size() const { return weights_.size(); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<ParameterPoint>& points() const { return points_; }
  const ParameterPoint& point(Eigen::Index i) const;
  bool probability() const { return probability_; }

  Eigen::VectorXd sqrt_weights() const;

  /// L2(M, w) inner product of two functions given at the sample points.
  double q_inner(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) const;

  bool same_samples(const SampledMeasure& other) const;

 private:
  std::vector<ParameterPoint> points_;
  Eigen::VectorXd weights_;
  bool probability_;
};

/// Columns r(mu_i) of the sampled parametric map r: M -> U, with U
/// discretised as R^d under the Euclidean inner product.
class SnapshotEnsemble {
 public:
  SnapshotEnsemble(Eigen::MatrixXd data, SampledMeasure measure);

  Eigen::Index state_dim() const { return data_.rows(); }
  Eigen::Index sample_count() const { return data_.cols(); }
  const Eigen::MatrixXd& data() const { return data_; }
  const SampledMeasure& measure() const { return measure_; }
  Eigen::VectorXd snapshot(Eigen::Index i) const;

 private:
  Eigen::MatrixXd data_;
  SampledMeasure measure_;
};

/// The correlation operator C = R*R as a symmetric positive semidefinite
/// d x d matrix. Construction validates symmetry and (to tolerance)
/// positive semidefiniteness, then symmetrizes exactly.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXd entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// C = sum_i w_i r(mu_i) r(mu_i)^T, symmetrized as (C + C^T)/2.
CorrelationMatrix assemble_correlation(const SnapshotEnsemble& ens);

/// (R u)(mu_i) = <r(mu_i), u>.
Eigen::VectorXd apply_R(const SnapshotEnsemble& ens, const Eigen::VectorXd& u);

/// R* phi = sum_i w_i phi_i r(mu_i).
Eigen::VectorXd apply_R_adjoint(const SnapshotEnsemble& ens,
                                const Eigen::VectorXd& phi);

struct LoadOptions {
  // Treat the final column of the parameter CSV as quadrature weights.
  bool weight_column = false;
  // Rescale weights to sum to one and flag the measure as a probability.
  bool probability_normalize = false;
};

/// Loads a d x N snapshot CSV and an N-row parameter CSV. Weights default
/// to 1/N when no weight column is declared.
SnapshotEnsemble load_ensemble(const std::filesystem::path& snapshot_path,
                               const std::filesystem::path& params_path,
                               const LoadOptions& options = {});

/// Parses the parameter CSV alone (used when subsystems share one file).
SampledMeasure load_measure(const std::filesystem::path& params_path,
                            const LoadOptions& options = {});

}  // namespace paramred

#endif  // PARAMRED_ENSEMBLE_HPP
