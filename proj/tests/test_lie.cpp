#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include <Eigen/Eigenvalues>

#include "paramred/errors.hpp"
#include "paramred/lie.hpp"
#include "paramred/rng.hpp"

using namespace paramred;

namespace {

Eigen::MatrixXd random_symmetric(Rng& rng, Eigen::Index n, double spectral_bound) {
  Eigen::MatrixXd h = rng.uniform_matrix(n, n, -1.0, 1.0);
  h = 0.5 * (h + h.transpose()).eval();
  // Scale to the requested 2-norm bound.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (norm > 0.0) h *= spectral_bound / norm * 0.9;
  return h;
}

Eigen::MatrixXd random_skew(Rng& rng, Eigen::Index n, double spectral_bound) {
  Eigen::MatrixXd s = rng.uniform_matrix(n, n, -1.0, 1.0);
  s = 0.5 * (s - s.transpose()).eval();
  const double norm = s.operatorNorm();
  if (norm > 0.0) s *= spectral_bound / norm * 0.9;
  return s;
}

// Independent oracle for the skew exponential: complex eigendecomposition
// of the (normal) matrix S, exponentiate the eigenvalues.
Eigen::MatrixXd skew_exp_oracle(const Eigen::MatrixXd& s) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s.cast<std::complex<double>>());
  Eigen::MatrixXcd lam = es.eigenvalues().array().exp().matrix().asDiagonal();
  Eigen::MatrixXcd result = es.eigenvectors() * lam *
                            es.eigenvectors().inverse();
  return result.real();
}

// Principal-log oracle via the complex eigendecomposition of Q.
Eigen::MatrixXd rotation_log_oracle(const Eigen::MatrixXd& q) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(q.cast<std::complex<double>>());
  Eigen::VectorXcd logs(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < logs.size(); ++i)
    logs[i] = std::log(es.eigenvalues()[i]);  // principal branch
  Eigen::MatrixXcd result =
      es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().inverse();
  return result.real();
}

}  // namespace

TEST_CASE("sym_exp and sym_log at the identity") {
  CHECK((sym_exp(Eigen::MatrixXd::Zero(3, 3)) -
         Eigen::MatrixXd::Identity(3, 3))
            .norm() == 0.0);
  CHECK(sym_log(Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("sym_log of a diagonal SPD matrix") {
  const Eigen::MatrixXd h = sym_log(Eigen::Vector2d(2, 3).asDiagonal());
  CHECK(h(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(h(1, 1) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(std::abs(h(0, 1)) <= 1e-15);
}

TEST_CASE("sym roundtrip: log(exp(H)) = H for |H| <= 2") {
  Rng rng(61);
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(7));
    const Eigen::MatrixXd h = random_symmetric(rng, n, 2.0);
    const Eigen::MatrixXd back = sym_log(sym_exp(h));
    CHECK((back - h).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("sym_exp output is SPD even for large symmetric input") {
  Rng rng(62);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd h = random_symmetric(rng, 5, 20.0);
    const Eigen::MatrixXd a = sym_exp(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("sym_log rejects non-SPD and asymmetric input") {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(sym_log(indefinite), DomainError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(sym_log(asym), InputError);
  CHECK_THROWS_AS(sym_exp(asym), InputError);
}

TEST_CASE("skew_exp of zero is the identity") {
  CHECK((skew_exp(Eigen::MatrixXd::Zero(4, 4)) -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() == 0.0);
}

TEST_CASE("skew_exp of the quarter-turn generator") {
  Eigen::MatrixXd s(2, 2);
  const double half_pi = 1.5707963267948966;
  s << 0, -half_pi, half_pi, 0;
  const Eigen::MatrixXd q = skew_exp(s);
  Eigen::MatrixXd expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK((q - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("skew_exp matches the complex eigendecomposition oracle") {
  Rng rng(63);
  for (int rep = 0; rep < 25; ++rep) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(7));
    const Eigen::MatrixXd s = random_skew(rng, n, 2.0);
    CHECK((skew_exp(s) - skew_exp_oracle(s)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("skew_exp output is orthogonal with determinant one") {
  Rng rng(64);
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(7));
    const Eigen::MatrixXd q = skew_exp(random_skew(rng, n, 3.0));
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm() <=
          1e-10);
    CHECK(std::abs(q.determinant() - 1.0) <= 1e-8);
  }
}

TEST_CASE("rotation roundtrip: log(exp(S)) = S with angles below pi") {
  Rng rng(65);
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(5));
    const Eigen::MatrixXd s = random_skew(rng, n, 2.0);
    const Eigen::MatrixXd back = rotation_log(skew_exp(s));
    CHECK((back - s).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("rotation_log matches the complex principal-log oracle") {
  Rng rng(66);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::MatrixXd q = skew_exp(random_skew(rng, 4, 2.5));
    const Eigen::MatrixXd s = rotation_log(q);
    CHECK((s - rotation_log_oracle(q)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((s + s.transpose()).norm() <= 1e-12);
  }
}

TEST_CASE("rotation_log rejects angles at pi") {
  Eigen::MatrixXd half_turn(2, 2);
  half_turn << -1, 0, 0, -1;
  CHECK_THROWS_AS(rotation_log(half_turn), LogBranchError);

  // 3x3 rotation by pi about the z axis.
  Eigen::MatrixXd r3 = Eigen::MatrixXd::Identity(3, 3);
  r3(0, 0) = -1;
  r3(1, 1) = -1;
  CHECK_THROWS_AS(rotation_log(r3), LogBranchError);
}

TEST_CASE("rotation_log rejects non-rotations") {
  Eigen::MatrixXd reflect = Eigen::MatrixXd::Identity(3, 3);
  reflect(2, 2) = -1;  // det = -1
  CHECK_THROWS_AS(rotation_log(reflect), InputError);
  CHECK_THROWS_AS(rotation_log(2.0 * Eigen::MatrixXd::Identity(3, 3)),
                  InputError);
}

TEST_CASE("skew_exp rejects non-skew input") {
  CHECK_THROWS_AS(skew_exp(Eigen::MatrixXd::Identity(3, 3)), InputError);
}
