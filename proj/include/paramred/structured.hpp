#ifndef PARAMRED_STRUCTURED_HPP
#define PARAMRED_STRUCTURED_HPP

#include <vector>

#include <Eigen/Core>

#include "paramred/ensemble.hpp"

namespace paramred {

/// Manifold tag of a matrix field. The *_LOG_COORDS tags mark fields whose
/// samples are already Lie-algebra elements and need no log/exp.
enum class Manifold { kSpd, kRotation, kSymmetricLogCoords, kSkewLogCoords };

/// Matrix Lie algebra of the coefficient matrices R_k.
enum class Algebra { kSymmetric, kSkew };

const char* manifold_name(Manifold m);
Manifold manifold_from_name(const std::string& name);

/// Vector-valued parametric model r(mu) = sum_k r_k(mu) rvec_k in the
/// tensor space U (x) E: k scalar component models over one shared measure
/// plus their frame vectors rvec_k in R^e.
class VectorFieldEnsemble {
 public:
  /// `frame` holds rvec_k as columns (e x k).
  VectorFieldEnsemble(std::vector<SnapshotEnsemble> components,
                      Eigen::MatrixXd frame);

  Eigen::Index component_count() const { return frame_.cols(); }
  Eigen::Index frame_dim() const { return frame_.rows(); }
  Eigen::Index state_dim() const { return components_[0].state_dim(); }
  Eigen::Index sample_count() const { return components_[0].sample_count(); }
  const std::vector<SnapshotEnsemble>& components() const {
    return components_;
  }
  const Eigen::MatrixXd& frame() const { return frame_; }
  const SampledMeasure& measure() const { return components_[0].measure(); }

 private:
  std::vector<SnapshotEnsemble> components_;
  Eigen::MatrixXd frame_;
};

/// Per-parameter matrix field A(mu_i) with its manifold tag and the
/// Lie-algebra log-coordinates H(mu_i).
class MatrixFieldEnsemble {
 public:
  /// Validates the samples against the tag and computes log coordinates
  /// (the identity for the *_LOG_COORDS tags).
  MatrixFieldEnsemble(std::vector<Eigen::MatrixXd> samples, Manifold manifold);

  Eigen::Index sample_count() const {
    return static_cast<Eigen::Index>(samples_.size());
  }
  Eigen::Index matrix_dim() const { return samples_[0].rows(); }
  Manifold manifold() const { return manifold_; }
  const std::vector<Eigen::MatrixXd>& samples() const { return samples_; }
  const std::vector<Eigen::MatrixXd>& log_coords() const {
    return log_coords_;
  }

 private:
  std::vector<Eigen::MatrixXd> samples_;
  Manifold manifold_;
  std::vector<Eigen::MatrixXd> log_coords_;
};

/// N x N grid of e x e kernel blocks kappa(mu_i, mu_j), stored assembled.
/// The assembled matrix is exactly symmetric (block-symmetry
/// kappa(mu_i,mu_j) = kappa(mu_j,mu_i)^T holds by construction).
class MatrixKernelBlock {
 public:
  MatrixKernelBlock(Eigen::MatrixXd assembled, Eigen::Index sample_count);

  Eigen::Index sample_count() const { return sample_count_; }
  Eigen::Index block_dim() const { return block_dim_; }
  const Eigen::MatrixXd& assembled() const { return assembled_; }
  Eigen::MatrixXd block(Eigen::Index i, Eigen::Index j) const;

  /// (W^{1/2} (x) I) K (W^{1/2} (x) I): the kernel weighted by the measure,
  /// whose nonzero spectrum matches the matching state-side operator.
  Eigen::MatrixXd weighted_assembled(const SampledMeasure& measure) const;

 private:
  Eigen::MatrixXd assembled_;
  Eigen::Index sample_count_;
  Eigen::Index block_dim_;
};

/// kappa_E(mu_i, mu_j) = sum_{k,l} <r_k(mu_i), r_l(mu_j)> rvec_k rvec_l^T.
MatrixKernelBlock vector_kernel(const VectorFieldEnsemble& vfe);

/// The vector correlation on the flattened space R^{d*e}:
/// C_E = sum_{k,l} C_kl (x) rvec_k rvec_l^T with
/// C_kl = sum_i w_i r_k(mu_i) r_l(mu_i)^T. Flattening is state-major:
/// (u (x) uvec)[a*e + p] = u[a] * uvec[p].
CorrelationMatrix vector_correlation(const VectorFieldEnsemble& vfe);

/// The flattened ensemble with columns sum_k kron(r_k(mu_i), rvec_k).
SnapshotEnsemble flatten(const VectorFieldEnsemble& vfe);

/// kappa_F(mu_i, mu_j) = sum_{k,l} <r_k(mu_i), r_l(mu_j)> R_k^T R_l for
/// coefficient matrices R_k in the declared algebra.
MatrixKernelBlock tensor_kernel(const std::vector<SnapshotEnsemble>& components,
                                const std::vector<Eigen::MatrixXd>& maps,
                                Algebra algebra);

/// Flattens the log-coordinates H(mu_i) to snapshot columns over the fixed
/// basis of the algebra (diagonal first, then upper triangle row-major;
/// off-diagonal coordinates scaled by sqrt(2) so the Euclidean inner
/// product equals the Frobenius one). The measure defaults to uniform
/// index-labelled samples.
SnapshotEnsemble encode_field(const MatrixFieldEnsemble& mfe);
SnapshotEnsemble encode_field(const MatrixFieldEnsemble& mfe,
                              const SampledMeasure& measure);

/// Inverse of encode_field: unflattens and exponentiates back onto the
/// manifold. `n` is the matrix dimension.
MatrixFieldEnsemble decode_field(const SnapshotEnsemble& ens,
                                 Manifold manifold, Eigen::Index n);

// Fixed flattening bases of sym(n) and so(n).
Eigen::Index sym_coord_count(Eigen::Index n);
Eigen::Index skew_coord_count(Eigen::Index n);
Eigen::VectorXd flatten_sym(const Eigen::MatrixXd& h);
Eigen::MatrixXd unflatten_sym(const Eigen::VectorXd& c, Eigen::Index n);
Eigen::VectorXd flatten_skew(const Eigen::MatrixXd& s);
Eigen::MatrixXd unflatten_skew(const Eigen::VectorXd& c, Eigen::Index n);

}  // namespace paramred

#endif  // PARAMRED_STRUCTURED_HPP
