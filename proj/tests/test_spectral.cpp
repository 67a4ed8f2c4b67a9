#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "paramred/ensemble.hpp"
#include "paramred/errors.hpp"
#include "paramred/kernel.hpp"
#include "paramred/rng.hpp"
#include "paramred/spectral.hpp"

using namespace paramred;

namespace {

SnapshotEnsemble make_ensemble(const Eigen::MatrixXd& data,
                               const Eigen::VectorXd& weights) {
  std::vector<ParameterPoint> pts;
  for (Eigen::Index i = 0; i < data.cols(); ++i)
    pts.push_back(ParameterPoint{{double(i)}, ""});
  return SnapshotEnsemble(data, SampledMeasure(pts, weights));
}

SnapshotEnsemble random_ensemble(Rng& rng, Eigen::Index d, Eigen::Index n) {
  return make_ensemble(rng.uniform_matrix(d, n, -1.0, 1.0),
                       rng.uniform_vector(n, 0.1, 2.0));
}

CorrelationMatrix random_psd(Rng& rng, Eigen::Index d) {
  const Eigen::MatrixXd m = rng.uniform_matrix(d, d, -1.0, 1.0);
  return CorrelationMatrix(m.transpose() * m);
}

// Zero-padded descending-spectrum comparison, scaled by the leading value.
double spectra_gap(Eigen::VectorXd a, Eigen::VectorXd b) {
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  std::sort(b.data(), b.data() + b.size(), std::greater<double>());
  const auto n = std::max(a.size(), b.size());
  const double scale =
      std::max({a.size() ? a[0] : 0.0, b.size() ? b[0] : 0.0, 1e-300});
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    worst = std::max(worst, std::abs((i < a.size() ? a[i] : 0.0) -
                                     (i < b.size() ? b[i] : 0.0)) /
                                scale);
  return worst;
}

}  // namespace

// ---- eigendecompose --------------------------------------------------------

TEST_CASE("eigendecompose of a diagonal matrix") {
  const auto sd = eigendecompose(
      CorrelationMatrix(Eigen::Vector2d(4, 1).asDiagonal()));
  CHECK(sd.eigenvalues[0] == 4.0);
  CHECK(sd.eigenvalues[1] == 1.0);
  CHECK((sd.eigenvectors.col(0) - Eigen::Vector2d(1, 0)).norm() <= 1e-14);
  CHECK((sd.eigenvectors.col(1) - Eigen::Vector2d(0, 1)).norm() <= 1e-14);
}

TEST_CASE("eigendecompose of the analytic 2x2") {
  Eigen::MatrixXd c(2, 2);
  c << 2, 1, 1, 2;
  const auto sd = eigendecompose(CorrelationMatrix(c));
  CHECK(sd.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sd.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK((sd.eigenvectors.col(0) - Eigen::Vector2d(inv_sqrt2, inv_sqrt2)).norm() <=
        1e-12);
  // Second eigenvector is (1,-1)/sqrt(2) up to the sign convention, which
  // makes the largest-magnitude (first, on ties) entry nonnegative.
  CHECK((sd.eigenvectors.col(1) - Eigen::Vector2d(inv_sqrt2, -inv_sqrt2)).norm() <=
        1e-12);
}

TEST_CASE("eigendecompose reconstructs random PSD matrices") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const auto c = random_psd(rng, 6);
    const auto sd = eigendecompose(c);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(6, 6);
    for (Eigen::Index m = 0; m < 6; ++m)
      rebuilt += sd.eigenvalues[m] * sd.eigenvectors.col(m) *
                 sd.eigenvectors.col(m).transpose();
    CHECK((rebuilt - c.entries()).norm() <= 1e-11 * c.entries().norm());
    CHECK((sd.eigenvectors.transpose() * sd.eigenvectors -
           Eigen::MatrixXd::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("indefinite matrices are rejected at construction") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, -0.5;
  CHECK_THROWS_AS(CorrelationMatrix{m}, NotPsdError);
}

// ---- kl_expand ---------------------------------------------------------------

TEST_CASE("kl_expand of a rank-1 ensemble") {
  Rng rng(32);
  Eigen::VectorXd v = rng.uniform_vector(5, -1.0, 1.0);
  v.normalize();
  const Eigen::VectorXd coeff = rng.uniform_vector(4, -2.0, 2.0);
  Eigen::MatrixXd data(5, 4);
  for (Eigen::Index i = 0; i < 4; ++i) data.col(i) = coeff[i] * v;
  const auto kl = kl_expand(make_ensemble(data, Eigen::VectorXd::Ones(4)));
  CHECK(kl.rank() == 1);
  CHECK(kl.singular_values()[0] ==
        doctest::Approx(coeff.norm()).epsilon(1e-12));
  CHECK(std::abs(kl.spatial_modes().col(0).dot(v)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kl_expand of orthonormal snapshots") {
  const auto kl = kl_expand(make_ensemble(Eigen::MatrixXd::Identity(2, 2),
                                          Eigen::Vector2d(1, 1)));
  CHECK(kl.rank() == 2);
  CHECK(kl.singular_values()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kl.singular_values()[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kl_expand reconstructs and matches the correlation spectrum") {
  Rng rng(33);
  const auto ens = random_ensemble(rng, 8, 5);
  const auto kl = kl_expand(ens);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i)
    worst = std::max(worst,
                     (reconstruct(kl, i) - ens.data().col(i)).norm() /
                         std::max(ens.data().col(i).norm(), 1e-300));
  CHECK(worst <= 1e-10);

  const auto sd = eigendecompose(assemble_correlation(ens));
  CHECK(spectra_gap(kl.eigenvalues(), sd.eigenvalues) <= 1e-10);
}

TEST_CASE("kl_expand mode orthonormality in U and Q") {
  Rng rng(34);
  const auto ens = random_ensemble(rng, 7, 6);
  const auto kl = kl_expand(ens);
  const Eigen::MatrixXd vtv =
      kl.spatial_modes().transpose() * kl.spatial_modes();
  CHECK((vtv - Eigen::MatrixXd::Identity(kl.rank(), kl.rank()))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  const Eigen::MatrixXd stws = kl.parametric_modes().transpose() *
                               ens.measure().weights().asDiagonal() *
                               kl.parametric_modes();
  CHECK((stws - Eigen::MatrixXd::Identity(kl.rank(), kl.rank()))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("kl_expand of the zero ensemble has rank 0") {
  const auto kl = kl_expand(
      make_ensemble(Eigen::MatrixXd::Zero(3, 2), Eigen::Vector2d(1, 1)));
  CHECK(kl.rank() == 0);
  CHECK(reconstruct(kl, 0).norm() == 0.0);
  CHECK(reconstruct(kl, 1).norm() == 0.0);
}

TEST_CASE("kl_expand is deterministic and sign-fixed") {
  Rng rng(35);
  const auto ens = random_ensemble(rng, 6, 4);
  const auto kl1 = kl_expand(ens);
  const auto kl2 = kl_expand(ens);
  CHECK(kl1.spatial_modes() == kl2.spatial_modes());
  CHECK(kl1.parametric_modes() == kl2.parametric_modes());
  for (Eigen::Index m = 0; m < kl1.rank(); ++m) {
    Eigen::Index arg;
    kl1.spatial_modes().col(m).cwiseAbs().maxCoeff(&arg);
    CHECK(kl1.spatial_modes()(arg, m) >= 0.0);
  }
}

// ---- method_of_snapshots ------------------------------------------------------

TEST_CASE("method_of_snapshots on orthonormal snapshots") {
  const auto ens = make_ensemble(Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::Vector2d(1, 1));
  const auto ks = method_of_snapshots(gram(ens), ens.measure());
  CHECK(ks.eigenvalues.size() == 2);
  CHECK(ks.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ks.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  const auto sd = eigendecompose(assemble_correlation(ens));
  CHECK(spectra_gap(ks.eigenvalues, sd.eigenvalues) <= 1e-12);
}

TEST_CASE("method_of_snapshots with a single sample") {
  Eigen::MatrixXd data(3, 1);
  data << 1, 2, 2;
  const double w = 0.7;
  const auto ens = make_ensemble(data, Eigen::VectorXd::Constant(1, w));
  const auto ks = method_of_snapshots(gram(ens), ens.measure());
  CHECK(ks.eigenvalues.size() == 1);
  CHECK(ks.eigenvalues[0] == doctest::Approx(w * 9.0).epsilon(1e-13));
}

TEST_CASE("U-side and Q-side spectra coincide") {
  Rng rng(36);
  const auto ens = random_ensemble(rng, 10, 4);
  const auto sd = eigendecompose(assemble_correlation(ens));
  const auto ks = method_of_snapshots(gram(ens), ens.measure());
  CHECK(spectra_gap(sd.eigenvalues, ks.eigenvalues) <= 1e-10);
}

TEST_CASE("method_of_snapshots modes are W-orthonormal and Mercer holds") {
  Rng rng(37);
  const auto ens = random_ensemble(rng, 9, 5);
  const auto g = gram(ens);
  const auto ks = method_of_snapshots(g, ens.measure());
  const Eigen::Index r = ks.eigenvalues.size();

  const Eigen::MatrixXd stws = ks.parametric_modes.transpose() *
                               ens.measure().weights().asDiagonal() *
                               ks.parametric_modes;
  CHECK((stws - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() <=
        1e-10);

  // Mercer: kappa(mu_i, mu_j) = sum_m lambda_m s_m(i) s_m(j).
  Eigen::MatrixXd mercer = Eigen::MatrixXd::Zero(5, 5);
  for (Eigen::Index m = 0; m < r; ++m)
    mercer += ks.eigenvalues[m] * ks.parametric_modes.col(m) *
              ks.parametric_modes.col(m).transpose();
  CHECK((mercer - g.entries()).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, g.entries().cwiseAbs().maxCoeff()));
}

TEST_CASE("method_of_snapshots rejects measure size mismatch") {
  Rng rng(38);
  const auto ens = random_ensemble(rng, 4, 3);
  const auto other = random_ensemble(rng, 4, 5);
  CHECK_THROWS_AS(method_of_snapshots(gram(ens), other.measure()), InputError);
}

// ---- truncate / reconstruct ---------------------------------------------------

TEST_CASE("truncation error equals the eigenvalue tail") {
  Rng rng(39);
  const auto ens = random_ensemble(rng, 8, 6);
  const auto kl = kl_expand(ens);
  const Eigen::VectorXd lambda = kl.eigenvalues();
  const double total = lambda.sum();
  for (Eigen::Index n = 0; n <= kl.rank(); ++n) {
    const auto cut = truncate(kl, n);
    CHECK(cut.rank() == n);
    double tail = 0.0;
    for (Eigen::Index m = n; m < kl.rank(); ++m) tail += lambda[m];
    CHECK(std::abs(cut.discarded_energy() - tail) <= 1e-12 * total);
    const double measured = reconstruction_error_sq(cut, ens);
    CHECK(std::abs(measured - tail) <= 1e-10 * std::max(tail, 1e-12 * total));
  }
}

TEST_CASE("two-mode ensemble truncated to one mode leaves lambda_2") {
  Rng rng(40);
  const Eigen::MatrixXd basis = rng.uniform_matrix(6, 2, -1.0, 1.0);
  const Eigen::MatrixXd coeff = rng.uniform_matrix(2, 5, -1.0, 1.0);
  const auto ens =
      make_ensemble(basis * coeff, Eigen::VectorXd::Constant(5, 0.2));
  const auto kl = kl_expand(ens);
  REQUIRE(kl.rank() == 2);
  const double lambda2 = kl.eigenvalues()[1];
  const double measured = reconstruction_error_sq(truncate(kl, 1), ens);
  CHECK(measured == doctest::Approx(lambda2).epsilon(1e-10));
}

TEST_CASE("energy-tolerance truncation picks the smallest admissible n") {
  Rng rng(41);
  const auto ens = random_ensemble(rng, 7, 5);
  const auto kl = kl_expand(ens);
  const Eigen::VectorXd lambda = kl.eigenvalues();
  double tail2 = 0.0;
  for (Eigen::Index m = 2; m < kl.rank(); ++m) tail2 += lambda[m];
  const auto cut = truncate_to_energy(kl, std::sqrt(tail2) * (1 + 1e-12));
  CHECK(cut.rank() == 2);
  CHECK(truncate_to_energy(kl, 0.0).rank() == kl.rank());
}

TEST_CASE("truncate rejects n beyond rank") {
  Rng rng(42);
  const auto kl = kl_expand(random_ensemble(rng, 4, 3));
  CHECK_THROWS_AS(truncate(kl, kl.rank() + 1), InputError);
}

TEST_CASE("reconstruct single-mode oracle") {
  Rng rng(43);
  const auto ens = random_ensemble(rng, 6, 4);
  const auto kl = truncate(kl_expand(ens), 1);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const Eigen::VectorXd oracle = kl.singular_values()[0] *
                                   kl.parametric_modes()(i, 0) *
                                   kl.spatial_modes().col(0);
    CHECK((reconstruct(kl, i) - oracle).norm() == 0.0);
  }
  CHECK_THROWS_AS(reconstruct(kl, 4), InputError);
}

TEST_CASE("Eckart-Young: no random rank-n candidate beats the expansion") {
  Rng rng(44);
  const auto ens = random_ensemble(rng, 7, 6);
  const auto kl = kl_expand(ens);
  for (Eigen::Index n = 1; n <= 3; ++n) {
    const double optimal = reconstruction_error_sq(truncate(kl, n), ens);
    for (int trial = 0; trial < 100; ++trial) {
      // Random rank-n spatial basis; best coefficients are the projection.
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(
                                    rng.gaussian_matrix(7, n))
                                    .householderQ() *
                                Eigen::MatrixXd::Identity(7, n);
      double err = 0.0;
      for (Eigen::Index i = 0; i < 6; ++i) {
        const Eigen::VectorXd r = ens.data().col(i);
        err += ens.measure().weights()[i] *
               (r - q * (q.transpose() * r)).squaredNorm();
      }
      CHECK(err >= optimal - 1e-10 * std::max(optimal, 1.0));
    }
  }
}

// ---- factorizations ------------------------------------------------------------

TEST_CASE("cholesky_factor basics") {
  const auto b_eye =
      cholesky_factor(CorrelationMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK((b_eye.factor() - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  const auto b_diag =
      cholesky_factor(CorrelationMatrix(Eigen::Vector2d(4, 1).asDiagonal()));
  CHECK((b_diag.factor() -
         Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix())
            .norm() <= 1e-15);
}

TEST_CASE("cholesky_factor residual on random PSD matrices") {
  Rng rng(45);
  for (int rep = 0; rep < 10; ++rep) {
    const auto c = random_psd(rng, 6);
    const auto b = cholesky_factor(c);
    CHECK((b.correlation() - c.entries()).norm() <=
          1e-11 * c.entries().norm());
  }
}

TEST_CASE("cholesky_factor handles singular matrices via pivoting") {
  Rng rng(46);
  const Eigen::MatrixXd m = rng.uniform_matrix(3, 6, -1.0, 1.0);  // rank 3
  const auto c = CorrelationMatrix(m.transpose() * m);
  const auto b = cholesky_factor(c);
  CHECK(b.codomain_dim() == 3);
  CHECK((b.correlation() - c.entries()).norm() <= 1e-10 * c.entries().norm());
}

TEST_CASE("sqrt_factor basics and squaring oracle") {
  const auto b =
      sqrt_factor(CorrelationMatrix(Eigen::Vector2d(4, 9).asDiagonal()));
  CHECK((b.factor() - Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix())
            .norm() <= 1e-14);

  const auto zero =
      sqrt_factor(CorrelationMatrix(Eigen::MatrixXd::Zero(2, 2)));
  CHECK(zero.factor().norm() == 0.0);

  Rng rng(47);
  const auto c = random_psd(rng, 5);
  const auto s = sqrt_factor(c);
  CHECK((s.factor() * s.factor() - c.entries()).norm() <=
        1e-10 * c.entries().norm());
  CHECK((s.factor() - s.factor().transpose()).norm() == 0.0);
}

TEST_CASE("factorization closure: B B^T has the spectrum of C") {
  Rng rng(48);
  const auto c = random_psd(rng, 5);
  const auto sd = eigendecompose(c);
  for (const Factorization& b : {cholesky_factor(c), sqrt_factor(c)}) {
    const Eigen::MatrixXd bbt = b.factor() * b.factor().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bbt);
    CHECK(spectra_gap(es.eigenvalues(), sd.eigenvalues) <= 1e-10);
  }
}

TEST_CASE("unitary_equivalence returns the identity for equal factors") {
  Rng rng(49);
  const auto c = random_psd(rng, 4);
  const auto b = cholesky_factor(c);
  const Eigen::MatrixXd x = unitary_equivalence(b, b);
  CHECK((x - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("unitary_equivalence maps sqrt factor onto cholesky factor") {
  Eigen::MatrixXd centries(2, 2);
  centries << 2, 1, 1, 2;
  const CorrelationMatrix c(centries);
  const auto b1 = sqrt_factor(c);
  const auto b2 = cholesky_factor(c);
  const Eigen::MatrixXd x = unitary_equivalence(b1, b2);
  CHECK((b2.factor() - x * b1.factor()).norm() <= 1e-10 * b2.factor().norm());
  CHECK((x.transpose() * x - Eigen::MatrixXd::Identity(2, 2)).norm() <=
        1e-10);
}

TEST_CASE("unitary_equivalence recovers a planted orthogonal map") {
  Rng rng(50);
  for (int rep = 0; rep < 5; ++rep) {
    const auto c = random_psd(rng, 5);
    const auto b1 = sqrt_factor(c);
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(rng.gaussian_matrix(5, 5))
            .householderQ();
    const Factorization b2(q * b1.factor());
    const Eigen::MatrixXd x = unitary_equivalence(b1, b2);
    CHECK((x - q).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("unitary_equivalence on singular C certified on the row space") {
  Rng rng(51);
  const Eigen::MatrixXd m = rng.uniform_matrix(3, 6, -1.0, 1.0);
  const auto c = CorrelationMatrix(m.transpose() * m);  // rank 3 in dim 6
  const auto b1 = sqrt_factor(c);
  const auto b2 = Factorization(b1.factor());
  const Eigen::MatrixXd x = unitary_equivalence(b1, b2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b1.factor(), Eigen::ComputeFullV);
  const Eigen::MatrixXd vr = svd.matrixV().leftCols(3);
  const Eigen::MatrixXd proj = vr * vr.transpose();
  CHECK(((b2.factor() - x * b1.factor()) * proj).norm() <=
        1e-9 * b2.factor().norm());
}

TEST_CASE("unitary_equivalence rejects factors of different correlations") {
  Rng rng(52);
  const auto b1 = cholesky_factor(random_psd(rng, 4));
  const auto b2 = cholesky_factor(random_psd(rng, 4));
  CHECK_THROWS_AS(unitary_equivalence(b1, b2), FactorizationMismatchError);
}

// ---- cross-route spectrum property ---------------------------------------------

TEST_CASE("spectrum equality AWA^T vs W^1/2 A^T A W^1/2 across random sizes") {
  Rng rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = static_cast<Eigen::Index>(2 + rng.below(18));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(18));
    const auto ens = random_ensemble(rng, d, n);
    const auto sd = eigendecompose(assemble_correlation(ens));
    const auto ks = method_of_snapshots(gram(ens), ens.measure());
    CHECK(spectra_gap(sd.eigenvalues, ks.eigenvalues) <= 1e-10);
  }
}
