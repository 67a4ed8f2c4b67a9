#ifndef PARAMRED_KERNEL_HPP
#define PARAMRED_KERNEL_HPP

#include <Eigen/Core>

#include "paramred/ensemble.hpp"

namespace paramred {

/// Gram matrix of the reproducing kernel at the sample points,
/// G_ij = kappa(mu_i, mu_j) = <r(mu_i), r(mu_j)>. Depends only on the U
/// inner product; measure weights play no role here.
class GramKernel {
 public:
  GramKernel(Eigen::MatrixXd entries, Eigen::Index state_dim);

  Eigen::Index size() const { return entries_.rows(); }
  Eigen::Index state_dim() const { return state_dim_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
  Eigen::Index state_dim_;
};

/// phi = sum_i a_i kappa(mu_i, .), represented by its coefficient vector
/// against the sample kernels.
struct RKHSFunction {
  Eigen::VectorXd coeffs;
};

/// G = A^T A.
GramKernel gram(const SnapshotEnsemble& ens);

/// Kernel values between two sample sets: K_ij = <r_a(mu_i), r_b(nu_j)>.
/// This is the out-of-sample evaluation path; the caller supplies the new
/// snapshots r_b.
Eigen::MatrixXd cross_gram(const SnapshotEnsemble& a,
                           const SnapshotEnsemble& b);

/// RKHS inner product <phi, psi>_R = a^T G b.
double rkhs_inner(const RKHSFunction& a, const RKHSFunction& b,
                  const GramKernel& G);

/// Reproducing property: <kappa(mu_j, .), phi>_R, which equals the
/// pointwise value phi(mu_j) by the same arithmetic.
double reproduce(const GramKernel& G, Eigen::Index j, const RKHSFunction& phi);

/// Pointwise value phi(mu_j) = (G a)_j.
double point_value(const GramKernel& G, const RKHSFunction& phi,
                   Eigen::Index j);

}  // namespace paramred

#endif  // PARAMRED_KERNEL_HPP
