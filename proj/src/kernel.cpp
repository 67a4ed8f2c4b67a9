#include "paramred/kernel.hpp"

#include "paramred/errors.hpp"
#include "paramred/kernels.hpp"

namespace paramred {

GramKernel::GramKernel(Eigen::MatrixXd entries, Eigen::Index state_dim)
    : entries_(std::move(entries)), state_dim_(state_dim) {
  if (entries_.rows() != entries_.cols())
    throw InputError("gram: matrix is not square");
  if (!entries_.allFinite()) throw InputError("gram: non-finite entries");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    if (entries_(i, i) < 0.0)
      throw InputError("gram: negative diagonal entry at " +
                       std::to_string(i));
}

GramKernel gram(const SnapshotEnsemble& ens) {
  return GramKernel(kernels::gram_matrix(ens.data()), ens.state_dim());
}

Eigen::MatrixXd cross_gram(const SnapshotEnsemble& a,
                           const SnapshotEnsemble& b) {
  if (a.state_dim() != b.state_dim())
    throw InputError("cross_gram: ensembles live in different state spaces");
  return kernels::cross_gram_matrix(a.data(), b.data());
}

double rkhs_inner(const RKHSFunction& a, const RKHSFunction& b,
                  const GramKernel& G) {
  if (a.coeffs.size() != G.size() || b.coeffs.size() != G.size())
    throw InputError("rkhs_inner: coefficient length does not match kernel");
  // a^T (G b), with the inner contraction row-by-row left to right.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < G.size(); ++i) {
    double gb = 0.0;
    for (Eigen::Index j = 0; j < G.size(); ++j)
      gb += G.entries()(i, j) * b.coeffs[j];
    acc += a.coeffs[i] * gb;
  }
  return acc;
}

double point_value(const GramKernel& G, const RKHSFunction& phi,
                   Eigen::Index j) {
  if (j < 0 || j >= G.size())
    throw InputError("point_value: sample index out of range");
  if (phi.coeffs.size() != G.size())
    throw InputError("point_value: coefficient length does not match kernel");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < G.size(); ++i)
    acc += G.entries()(j, i) * phi.coeffs[i];
  return acc;
}

double reproduce(const GramKernel& G, Eigen::Index j,
                 const RKHSFunction& phi) {
  // <kappa(mu_j, .), phi>_R = e_j^T G a = (G a)_j: identical arithmetic to
  // the pointwise evaluation, so the reproducing identity is exact.
  return point_value(G, phi, j);
}

}  // namespace paramred
