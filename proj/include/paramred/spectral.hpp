#ifndef PARAMRED_SPECTRAL_HPP
#define PARAMRED_SPECTRAL_HPP

#include <Eigen/Core>

#include "paramred/ensemble.hpp"
#include "paramred/kernel.hpp"

namespace paramred {

// Relative threshold below which singular values count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Eigenpairs of the correlation matrix, eigenvalues descending,
/// eigenvectors orthonormal columns. Tiny negative eigenvalues (within
/// -1e-12 * lambda_max) are clipped to zero.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // d x d, column m pairs with eigenvalue m
};

/// Karhunen-Loeve / POD expansion r(mu_i) = sum_m sigma_m s_m(mu_i) v_m.
/// Spatial modes are orthonormal in U, parametric modes in Q
/// (S^T W S = I). `discarded_energy` carries sum_{m>n} lambda_m
/// accumulated by truncation.
class KLExpansion {
 public:
  KLExpansion(Eigen::VectorXd singular_values, Eigen::MatrixXd spatial_modes,
              Eigen::MatrixXd parametric_modes, double discarded_energy = 0.0);

  Eigen::Index rank() const { return singular_values_.size(); }
  Eigen::Index state_dim() const { return spatial_modes_.rows(); }
  Eigen::Index sample_count() const { return parametric_modes_.rows(); }
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  const Eigen::MatrixXd& spatial_modes() const { return spatial_modes_; }
  const Eigen::MatrixXd& parametric_modes() const { return parametric_modes_; }
  double discarded_energy() const { return discarded_energy_; }

  /// lambda_m = sigma_m^2.
  Eigen::VectorXd eigenvalues() const;

 private:
  Eigen::VectorXd singular_values_;
  Eigen::MatrixXd spatial_modes_;     // d x rank
  Eigen::MatrixXd parametric_modes_;  // N x rank
  double discarded_energy_;
};

/// Q-side spectrum from the method of snapshots: eigenvalues of
/// W^{1/2} G W^{1/2} (equal to those of C on the nonzero part) and the
/// parametric modes s_m = W^{-1/2} e_m, W-orthonormal.
struct KernelSpectrum {
  Eigen::VectorXd eigenvalues;       // descending, numerical rank only
  Eigen::MatrixXd parametric_modes;  // N x rank
};

/// A factor B with B^T B = C; codomain dimension h = rows of B.
class Factorization {
 public:
  explicit Factorization(Eigen::MatrixXd factor);

  Eigen::Index codomain_dim() const { return factor_.rows(); }
  Eigen::Index dim() const { return factor_.cols(); }
  const Eigen::MatrixXd& factor() const { return factor_; }

  /// B^T B, the correlation this factorization reproduces.
  Eigen::MatrixXd correlation() const;

 private:
  Eigen::MatrixXd factor_;
};

SpectralDecomposition eigendecompose(const CorrelationMatrix& c);

/// SVD of A W^{1/2}; see KLExpansion. Zero ensembles give a rank-0
/// expansion. Deterministic: modes are sign-fixed so that each spatial
/// mode's first entry of largest magnitude is nonnegative.
KLExpansion kl_expand(const SnapshotEnsemble& ens);

/// Eigendecomposition of W^{1/2} G W^{1/2} (the kernel-side route to the
/// same spectrum, Mercer form).
KernelSpectrum method_of_snapshots(const GramKernel& G,
                                   const SampledMeasure& measure);

/// Keeps the first n modes; the discarded energy sum_{m>n} lambda_m is
/// accumulated on the result.
KLExpansion truncate(const KLExpansion& kl, Eigen::Index n);

/// Smallest n with sum_{m>n} lambda_m <= eps^2.
KLExpansion truncate_to_energy(const KLExpansion& kl, double eps);

/// sum_m sigma_m s_m(mu_i) v_m.
Eigen::VectorXd reconstruct(const KLExpansion& kl, Eigen::Index i);

/// Weighted squared reconstruction error sum_i w_i |r_i - r_kl(mu_i)|^2.
double reconstruction_error_sq(const KLExpansion& kl,
                               const SnapshotEnsemble& ens);

/// B = L^T from C = L L^T. Falls back to a diagonally pivoted variant when
/// C is singular, in which case B has rank(C) rows.
Factorization cholesky_factor(const CorrelationMatrix& c);

/// B = C^{1/2} via spectral calculus; symmetric.
Factorization sqrt_factor(const CorrelationMatrix& c);

/// Orthogonal X minimising |B2 - X B1|_F (orthogonal Procrustes via the
/// SVD of B2 B1^T). Requires B1^T B1 = B2^T B2 to 1e-8 relative; when that
/// shared correlation is singular, X is only determined on the row space
/// of B1.
Eigen::MatrixXd unitary_equivalence(const Factorization& b1,
                                    const Factorization& b2);

}  // namespace paramred

#endif  // PARAMRED_SPECTRAL_HPP
