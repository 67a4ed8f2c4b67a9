#include "paramred/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "paramred/errors.hpp"

namespace paramred {

namespace {

// Flips column signs so the first entry of largest magnitude is
// nonnegative. `follower` (may be empty) gets the same flips.
void fix_signs(Eigen::MatrixXd& modes, Eigen::MatrixXd* follower) {
  for (Eigen::Index m = 0; m < modes.cols(); ++m) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < modes.rows(); ++i) {
      const double mag = std::abs(modes(i, m));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (modes(arg, m) < 0.0) {
      modes.col(m) *= -1.0;
      if (follower) follower->col(m) *= -1.0;
    }
  }
}

}  // namespace

// ---- KLExpansion ---------------------------------------------------------

KLExpansion::KLExpansion(Eigen::VectorXd singular_values,
                         Eigen::MatrixXd spatial_modes,
                         Eigen::MatrixXd parametric_modes,
                         double discarded_energy)
    : singular_values_(std::move(singular_values)),
      spatial_modes_(std::move(spatial_modes)),
      parametric_modes_(std::move(parametric_modes)),
      discarded_energy_(discarded_energy) {
  const Eigen::Index m = singular_values_.size();
  if (spatial_modes_.cols() != m || parametric_modes_.cols() != m)
    throw InputError("kl: mode count does not match singular values");
  for (Eigen::Index i = 0; i + 1 < m; ++i)
    if (singular_values_[i] < singular_values_[i + 1])
      throw InputError("kl: singular values not descending");
  if (m > 0 && singular_values_[m - 1] < 0.0)
    throw InputError("kl: negative singular value");
}

Eigen::VectorXd KLExpansion::eigenvalues() const {
  return singular_values_.array().square();
}

// ---- Factorization ---------------------------------------------------------

Factorization::Factorization(Eigen::MatrixXd factor)
    : factor_(std::move(factor)) {
  if (factor_.size() == 0) throw InputError("factorization: empty factor");
  if (!factor_.allFinite())
    throw InputError("factorization: non-finite entries");
}

Eigen::MatrixXd Factorization::correlation() const {
  return factor_.transpose() * factor_;
}

// ---- Decompositions --------------------------------------------------------

SpectralDecomposition eigendecompose(const CorrelationMatrix& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries());
  if (es.info() != Eigen::Success)
    throw Error("eigendecompose: solver failed to converge");

  const Eigen::Index d = c.dim();
  SpectralDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  // Eigen returns ascending order; store descending.
  const double lambda_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  for (Eigen::Index m = 0; m < d; ++m) {
    double lambda = es.eigenvalues()[d - 1 - m];
    if (lambda < 0.0) {
      if (lambda < -1e-12 * std::max(lambda_max, 1e-300))
        throw NotPsdError("eigendecompose: eigenvalue " +
                          std::to_string(lambda) + " below PSD tolerance");
      lambda = 0.0;
    }
    out.eigenvalues[m] = lambda;
    out.eigenvectors.col(m) = es.eigenvectors().col(d - 1 - m);
  }
  fix_signs(out.eigenvectors, nullptr);
  return out;
}

KLExpansion kl_expand(const SnapshotEnsemble& ens) {
  const Eigen::VectorXd sw = ens.measure().sqrt_weights();
  Eigen::MatrixXd b = ens.data();
  for (Eigen::Index i = 0; i < b.cols(); ++i) b.col(i) *= sw[i];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  Eigen::Index rank = 0;
  const double cutoff = sigma.size() > 0 ? kRankTolerance * sigma[0] : 0.0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;

  Eigen::MatrixXd spatial = svd.matrixU().leftCols(rank);
  Eigen::MatrixXd parametric(ens.sample_count(), rank);
  for (Eigen::Index m = 0; m < rank; ++m)
    parametric.col(m) = svd.matrixV().col(m).cwiseQuotient(sw);
  fix_signs(spatial, &parametric);

  return KLExpansion(sigma.head(rank), std::move(spatial),
                     std::move(parametric));
}

KernelSpectrum method_of_snapshots(const GramKernel& G,
                                   const SampledMeasure& measure) {
  if (G.size() != measure.size())
    throw InputError("method_of_snapshots: kernel has " +
                     std::to_string(G.size()) + " samples, measure has " +
                     std::to_string(measure.size()));
  const Eigen::Index n = G.size();
  const Eigen::VectorXd sw = measure.sqrt_weights();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = sw[i] * G.entries()(i, j) * sw[j];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw Error("method_of_snapshots: solver failed to converge");

  const double lambda_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double cutoff =
      kRankTolerance * kRankTolerance * std::max(lambda_max, 0.0);
  Eigen::Index rank = 0;
  while (rank < n && es.eigenvalues()[n - 1 - rank] > cutoff) ++rank;

  KernelSpectrum out;
  out.eigenvalues.resize(rank);
  out.parametric_modes.resize(n, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    out.eigenvalues[k] = std::max(es.eigenvalues()[n - 1 - k], 0.0);
    out.parametric_modes.col(k) =
        es.eigenvectors().col(n - 1 - k).cwiseQuotient(sw);
  }
  fix_signs(out.parametric_modes, nullptr);
  return out;
}

KLExpansion truncate(const KLExpansion& kl, Eigen::Index n) {
  if (n < 0 || n > kl.rank())
    throw InputError("truncate: n = " + std::to_string(n) +
                     " exceeds rank " + std::to_string(kl.rank()));
  double dropped = 0.0;
  for (Eigen::Index m = n; m < kl.rank(); ++m)
    dropped += kl.singular_values()[m] * kl.singular_values()[m];
  return KLExpansion(kl.singular_values().head(n),
                     kl.spatial_modes().leftCols(n),
                     kl.parametric_modes().leftCols(n),
                     kl.discarded_energy() + dropped);
}

KLExpansion truncate_to_energy(const KLExpansion& kl, double eps) {
  if (!(eps >= 0.0)) throw InputError("truncate: energy tolerance must be >= 0");
  const Eigen::VectorXd lambda = kl.eigenvalues();
  // Tail sums with the smallest terms added first for accuracy.
  std::vector<double> tail(static_cast<std::size_t>(kl.rank()) + 1, 0.0);
  for (Eigen::Index m = kl.rank() - 1; m >= 0; --m)
    tail[static_cast<std::size_t>(m)] =
        tail[static_cast<std::size_t>(m) + 1] + lambda[m];
  Eigen::Index n = 0;
  while (n < kl.rank() && tail[static_cast<std::size_t>(n)] > eps * eps) ++n;
  return truncate(kl, n);
}

Eigen::VectorXd reconstruct(const KLExpansion& kl, Eigen::Index i) {
  if (i < 0 || i >= kl.sample_count())
    throw InputError("reconstruct: sample index out of range");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kl.state_dim());
  for (Eigen::Index m = 0; m < kl.rank(); ++m)
    out += kl.singular_values()[m] * kl.parametric_modes()(i, m) *
           kl.spatial_modes().col(m);
  return out;
}

double reconstruction_error_sq(const KLExpansion& kl,
                               const SnapshotEnsemble& ens) {
  if (kl.sample_count() != ens.sample_count() ||
      kl.state_dim() != ens.state_dim())
    throw InputError("reconstruction_error_sq: expansion/ensemble mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ens.sample_count(); ++i) {
    const Eigen::VectorXd diff = ens.data().col(i) - reconstruct(kl, i);
    acc += ens.measure().weights()[i] * diff.squaredNorm();
  }
  return acc;
}

// ---- Factorizations --------------------------------------------------------

namespace {

// Diagonally pivoted Cholesky for singular PSD matrices. Returns L with
// P^T C P = L L^T; the factor B = (P L)^T has rank(C) rows.
Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& c) {
  const Eigen::Index d = c.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXd diag = c.diagonal();

  const double tol = d * 1e-15 * std::max(diag.maxCoeff(), 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    // Largest remaining diagonal entry (first index on ties).
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < d; ++i)
      if (diag[perm[static_cast<std::size_t>(i)]] >
          diag[perm[static_cast<std::size_t>(piv)]])
        piv = i;
    std::swap(perm[static_cast<std::size_t>(k)],
              perm[static_cast<std::size_t>(piv)]);
    const Eigen::Index pk = perm[static_cast<std::size_t>(k)];
    if (diag[pk] <= tol) break;

    const double lkk = std::sqrt(diag[pk]);
    l(pk, k) = lkk;
    for (Eigen::Index i = k + 1; i < d; ++i) {
      const Eigen::Index pi = perm[static_cast<std::size_t>(i)];
      double v = c(pi, pk);
      for (Eigen::Index j = 0; j < k; ++j) v -= l(pi, j) * l(pk, j);
      l(pi, k) = v / lkk;
      diag[pi] -= l(pi, k) * l(pi, k);
    }
    ++rank;
  }
  // Rows of B are the columns of L (already in original row order). A zero
  // matrix keeps one zero row so the factor stays well-formed.
  if (rank == 0) return Eigen::MatrixXd::Zero(1, d);
  return l.leftCols(rank).transpose();
}

}  // namespace

Factorization cholesky_factor(const CorrelationMatrix& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c.entries());
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd l = llt.matrixL();
    return Factorization(l.transpose());
  }
  // Singular (or nearly so): pivoted variant.
  return Factorization(pivoted_cholesky(c.entries()));
}

Factorization sqrt_factor(const CorrelationMatrix& c) {
  const SpectralDecomposition sd = eigendecompose(c);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(c.dim(), c.dim());
  for (Eigen::Index m = 0; m < sd.eigenvalues.size(); ++m) {
    b.noalias() += std::sqrt(sd.eigenvalues[m]) * sd.eigenvectors.col(m) *
                   sd.eigenvectors.col(m).transpose();
  }
  b = 0.5 * (b + b.transpose()).eval();
  return Factorization(std::move(b));
}

Eigen::MatrixXd unitary_equivalence(const Factorization& b1,
                                    const Factorization& b2) {
  if (b1.dim() != b2.dim())
    throw FactorizationMismatchError(
        "unitary_equivalence: factors act on different spaces");
  const Eigen::MatrixXd c1 = b1.correlation();
  const Eigen::MatrixXd c2 = b2.correlation();
  const double scale = std::max({c1.norm(), c2.norm(), 1e-300});
  if ((c1 - c2).norm() > 1e-8 * scale)
    throw FactorizationMismatchError(
        "unitary_equivalence: factors do not share a correlation matrix");

  // Orthogonal Procrustes: X = U V^T from the SVD of B2 B1^T. For factors
  // with different codomain dimensions the identity is padded, giving a
  // semi-orthogonal X.
  const Eigen::MatrixXd m = b2.factor() * b1.factor().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return svd.matrixU() * eye * svd.matrixV().transpose();
}

}  // namespace paramred
