#ifndef PARAMRED_TENSOR_HPP
#define PARAMRED_TENSOR_HPP

#include <vector>

#include <Eigen/Core>

#include "paramred/ensemble.hpp"

namespace paramred {

/// Snapshot tensor over a product parameter grid. Axis 0 is the state
/// dimension d, axes 1..K-1 the parameter grid sizes, entries stored
/// row-major (last index fastest). Each parameter axis carries a positive
/// weight vector; splitting operations fold them in as W^{1/2} scalings.
class SnapshotTensor {
 public:
  SnapshotTensor(std::vector<Eigen::Index> dims, std::vector<double> data,
                 std::vector<Eigen::VectorXd> axis_weights);

  /// Unit axis weights.
  SnapshotTensor(std::vector<Eigen::Index> dims, std::vector<double> data);

  Eigen::Index order() const {
    return static_cast<Eigen::Index>(dims_.size());
  }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index state_dim() const { return dims_[0]; }
  Eigen::Index total_size() const;
  const std::vector<double>& data() const { return data_; }
  const std::vector<Eigen::VectorXd>& axis_weights() const {
    return axis_weights_;
  }

  double at(const std::vector<Eigen::Index>& index) const;

  double frobenius_norm() const;
  /// Frobenius norm with each parameter axis scaled by W^{1/2}.
  double weighted_frobenius_norm() const;
  /// Same, of the difference against another tensor of equal shape.
  double weighted_error(const SnapshotTensor& other) const;

 private:
  std::vector<Eigen::Index> dims_;
  std::vector<double> data_;
  std::vector<Eigen::VectorXd> axis_weights_;
};

/// One TT core: an order-3 array of shape left x mid x right, stored as a
/// (left*mid) x right matrix with the left index varying slowest.
struct TTCore {
  Eigen::Index left, mid, right;
  Eigen::MatrixXd mat;
};

/// Tensor-train factorization from sequential left-to-right splits.
class TTDecomposition {
 public:
  TTDecomposition(std::vector<TTCore> cores,
                  std::vector<double> discarded_energies,
                  std::vector<Eigen::VectorXd> split_singular_values,
                  std::vector<Eigen::VectorXd> axis_weights);

  const std::vector<TTCore>& cores() const { return cores_; }
  std::vector<Eigen::Index> bond_dims() const;  // r_0 = 1, ..., r_K = 1
  const std::vector<double>& discarded_energies() const {
    return discarded_energies_;
  }
  const std::vector<Eigen::VectorXd>& split_singular_values() const {
    return split_singular_values_;
  }
  const std::vector<Eigen::VectorXd>& axis_weights() const {
    return axis_weights_;
  }

  /// sqrt(sum of per-split discarded energies): the TT-SVD error bound in
  /// the weighted norm.
  double error_bound() const;

 private:
  std::vector<TTCore> cores_;
  std::vector<double> discarded_energies_;
  std::vector<Eigen::VectorXd> split_singular_values_;
  std::vector<Eigen::VectorXd> axis_weights_;
};

/// Reshapes a snapshot ensemble over a row-major product grid. Per-axis
/// weights are either given explicitly or factored out of the measure
/// weights (which must then be a product measure).
SnapshotTensor tensorize(const SnapshotEnsemble& ens,
                         const std::vector<Eigen::Index>& grid_shape);
SnapshotTensor tensorize(const SnapshotEnsemble& ens,
                         const std::vector<Eigen::Index>& grid_shape,
                         std::vector<Eigen::VectorXd> axis_weights);

/// Inverse reshape: the d x N snapshot matrix.
Eigen::MatrixXd detensorize(const SnapshotTensor& t);

struct SplitResult {
  Eigen::MatrixXd left;            // (d * prod J1 dims) x r, unscaled
  Eigen::MatrixXd right;           // (prod J2 dims) x r, unscaled
  Eigen::VectorXd singular_values; // kept, descending
  double discarded_energy;         // sum of dropped sigma^2
  std::vector<Eigen::Index> row_axes;  // tensor axes grouped left
  std::vector<Eigen::Index> col_axes;
};

/// Two-way split along a partition (J1, J2) of the parameter axes
/// (0-based over the parameter axes; the state axis always joins J1).
/// Truncation: rank rule sigma <= 1e-12 sigma_1 plus energy tolerance
/// sum of dropped sigma^2 <= eps^2, in the weighted norm.
SplitResult split(const SnapshotTensor& t, const std::vector<Eigen::Index>& j1,
                  const std::vector<Eigen::Index>& j2, double eps);

/// Sequential left-to-right TT-SVD with per-split energy budget
/// eps^2/(K-1) and optional bond cap (0 = unlimited).
TTDecomposition tt_svd(const SnapshotTensor& t, double eps,
                       Eigen::Index max_bond = 0);

/// Full contraction back to a tensor of the original shape.
SnapshotTensor tt_reconstruct(const TTDecomposition& tt);

}  // namespace paramred

#endif  // PARAMRED_TENSOR_HPP
