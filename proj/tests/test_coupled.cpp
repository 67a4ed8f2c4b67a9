#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "paramred/coupled.hpp"
#include "paramred/ensemble.hpp"
#include "paramred/errors.hpp"
#include "paramred/kernel.hpp"
#include "paramred/rng.hpp"
#include "paramred/spectral.hpp"

using namespace paramred;

namespace {

SampledMeasure measure_of(Eigen::Index n, const Eigen::VectorXd& w) {
  std::vector<ParameterPoint> pts;
  for (Eigen::Index i = 0; i < n; ++i)
    pts.push_back(ParameterPoint{{double(i)}, ""});
  return SampledMeasure(pts, w);
}

CoupledEnsemble random_ce(Rng& rng, Eigen::Index d1, Eigen::Index d2,
                          Eigen::Index n) {
  return CoupledEnsemble(rng.uniform_matrix(d1, n, -1.0, 1.0),
                         rng.uniform_matrix(d2, n, -1.0, 1.0),
                         measure_of(n, rng.uniform_vector(n, 0.1, 2.0)));
}

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

// Tensor-grid coupled ensemble where sub1 depends only on mu1 and sub2
// only on mu2; samples row-major over (mu1, mu2).
CoupledEnsemble grid_ce(Rng& rng, Eigen::Index n1, Eigen::Index n2,
                        Eigen::Index d1, Eigen::Index d2) {
  const Eigen::MatrixXd f1 = rng.uniform_matrix(d1, n1, -1.0, 1.0);
  const Eigen::MatrixXd f2 = rng.uniform_matrix(d2, n2, -1.0, 1.0);
  const Eigen::Index n = n1 * n2;
  Eigen::MatrixXd data1(d1, n), data2(d2, n);
  std::vector<ParameterPoint> pts;
  for (Eigen::Index i1 = 0; i1 < n1; ++i1)
    for (Eigen::Index i2 = 0; i2 < n2; ++i2) {
      const Eigen::Index i = i1 * n2 + i2;
      data1.col(i) = f1.col(i1);
      data2.col(i) = f2.col(i2);
      pts.push_back(ParameterPoint{{double(i1), 10.0 + double(i2)}, ""});
    }
  return CoupledEnsemble(
      data1, data2,
      SampledMeasure(pts, Eigen::VectorXd::Constant(n, 1.0 / double(n))),
      Partition{{0}, {1}});
}

}  // namespace

TEST_CASE("coupled_R basics") {
  Rng rng(91);
  const SampledMeasure m = measure_of(2, Eigen::Vector2d(1, 1));
  const CoupledEnsemble ce(Eigen::MatrixXd::Identity(2, 2),
                           rng.uniform_matrix(3, 2, -1.0, 1.0), m);
  const auto [phi1, phi2] =
      coupled_R(ce, Eigen::Vector2d(1, 0), Eigen::Vector3d(0, 0, 0));
  CHECK(phi1[0] == 1.0);
  CHECK(phi1[1] == 0.0);
  CHECK(phi2.norm() == 0.0);
}

TEST_CASE("coupled_R matches per-subsystem apply_R") {
  Rng rng(92);
  const auto ce = random_ce(rng, 4, 3, 5);
  const Eigen::VectorXd u1 = rng.uniform_vector(4, -1.0, 1.0);
  const Eigen::VectorXd u2 = rng.uniform_vector(3, -1.0, 1.0);
  const auto [phi1, phi2] = coupled_R(ce, u1, u2);
  CHECK((phi1 - apply_R(ce.sub1(), u1)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((phi2 - apply_R(ce.sub2(), u2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("coupling_correlation is block diagonal with per-sub blocks") {
  Rng rng(93);
  const auto ce = random_ce(rng, 3, 2, 4);
  const auto cc = coupling_correlation(ce);
  const auto c1 = assemble_correlation(ce.sub1());
  const auto c2 = assemble_correlation(ce.sub2());
  CHECK((cc.entries().topLeftCorner(3, 3) - c1.entries()).norm() == 0.0);
  CHECK((cc.entries().bottomRightCorner(2, 2) - c2.entries()).norm() == 0.0);
  CHECK(cc.entries().topRightCorner(3, 2).norm() == 0.0);
}

TEST_CASE("zero second subsystem appends zero spectrum") {
  Rng rng(94);
  const SampledMeasure m = measure_of(3, rng.uniform_vector(3, 0.5, 1.5));
  const CoupledEnsemble ce(rng.uniform_matrix(4, 3, -1.0, 1.0),
                           Eigen::MatrixXd::Zero(2, 3), m);
  const auto sdc = eigendecompose(coupling_correlation(ce));
  const auto sd1 = eigendecompose(assemble_correlation(ce.sub1()));
  Eigen::VectorXd expect(6);
  expect << sd1.eigenvalues, 0.0, 0.0;
  CHECK(spectra_gap(sdc.eigenvalues, expect) <= 1e-12);
}

TEST_CASE("two rank-1 subsystems give the two-value spectrum") {
  const SampledMeasure m = measure_of(1, Eigen::VectorXd::Constant(1, 1.0));
  Eigen::MatrixXd r1(2, 1), r2(3, 1);
  r1 << 1, 1;       // lambda_1 = 2
  r2 << 1, 2, 2;    // lambda_2 = 9
  const CoupledEnsemble ce(r1, r2, m);
  const auto sd = eigendecompose(coupling_correlation(ce));
  CHECK(sd.eigenvalues[0] == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(sd.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(sd.eigenvalues.tail(3).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectrum union property on random instances") {
  Rng rng(95);
  for (int rep = 0; rep < 15; ++rep) {
    const auto d1 = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto d2 = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto ce = random_ce(rng, d1, d2, n);
    const auto sdc = eigendecompose(coupling_correlation(ce));
    Eigen::VectorXd joined(d1 + d2);
    joined << eigendecompose(assemble_correlation(ce.sub1())).eigenvalues,
        eigendecompose(assemble_correlation(ce.sub2())).eigenvalues;
    CHECK(spectra_gap(sdc.eigenvalues, joined) <= 1e-10);
  }
}

TEST_CASE("block additivity of the coupled quadratic form") {
  Rng rng(96);
  const auto ce = random_ce(rng, 5, 4, 6);
  const auto cc = coupling_correlation(ce);
  const auto c1 = assemble_correlation(ce.sub1());
  const auto c2 = assemble_correlation(ce.sub2());
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd u1 = rng.uniform_vector(5, -1.0, 1.0);
    const Eigen::VectorXd u2 = rng.uniform_vector(4, -1.0, 1.0);
    Eigen::VectorXd u(9);
    u << u1, u2;
    const double lhs = u.dot(cc.entries() * u);
    const double rhs = u1.dot(c1.entries() * u1) + u2.dot(c2.entries() * u2);
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
  }
}

TEST_CASE("coupled_kernel diagonals are per-subsystem grams") {
  Rng rng(97);
  const auto ce = random_ce(rng, 4, 3, 5);
  const auto k = coupled_kernel(ce);
  CHECK((k.diag1 - gram(ce.sub1()).entries()).norm() == 0.0);
  CHECK((k.diag2 - gram(ce.sub2()).entries()).norm() == 0.0);

  // Identical subsystems give identical diagonals.
  const CoupledEnsemble twin(ce.sub1().data(), ce.sub1().data(),
                             ce.measure());
  const auto tk = coupled_kernel(twin);
  CHECK((tk.diag1 - tk.diag2).norm() == 0.0);

  // Zero subsystem gives a zero diagonal.
  const CoupledEnsemble zero2(ce.sub1().data(), Eigen::MatrixXd::Zero(2, 5),
                              ce.measure());
  CHECK(coupled_kernel(zero2).diag2.norm() == 0.0);
}

TEST_CASE("kernel consistency: weighted diagonals share the block spectra") {
  Rng rng(98);
  const auto ce = random_ce(rng, 6, 5, 4);
  const auto k = coupled_kernel(ce);
  const Eigen::VectorXd sw = ce.measure().sqrt_weights();
  for (int sub = 0; sub < 2; ++sub) {
    const Eigen::MatrixXd& diag = sub == 0 ? k.diag1 : k.diag2;
    const Eigen::MatrixXd weighted =
        sw.asDiagonal() * diag * sw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(weighted,
                                                      Eigen::EigenvaluesOnly);
    const auto sd = eigendecompose(
        assemble_correlation(sub == 0 ? ce.sub1() : ce.sub2()));
    CHECK(spectra_gap(es.eigenvalues(), sd.eigenvalues) <= 1e-10);
  }
}

TEST_CASE("coupled_pod joint error is the sum of per-block tails") {
  Rng rng(99);
  const auto ce = random_ce(rng, 6, 5, 4);
  const auto kl1 = kl_expand(ce.sub1());
  const auto kl2 = kl_expand(ce.sub2());

  // Full rank: zero joint error.
  const auto full = coupled_pod(ce, kl1.rank(), kl2.rank());
  CHECK(full.joint_squared_error == 0.0);

  for (Eigen::Index n1 = 0; n1 <= kl1.rank(); ++n1)
    for (Eigen::Index n2 = 0; n2 <= kl2.rank(); ++n2) {
      const auto pod = coupled_pod(ce, n1, n2);
      const double measured = reconstruction_error_sq(pod.kl1, ce.sub1()) +
                              reconstruction_error_sq(pod.kl2, ce.sub2());
      const double scale =
          kl1.eigenvalues().sum() + kl2.eigenvalues().sum();
      CHECK(std::abs(pod.joint_squared_error - measured) <= 1e-10 * scale);
    }
}

TEST_CASE("coupled_pod with a zero subsystem reduces to the other block") {
  Rng rng(100);
  const SampledMeasure m = measure_of(4, rng.uniform_vector(4, 0.3, 1.0));
  const CoupledEnsemble ce(rng.uniform_matrix(5, 4, -1.0, 1.0),
                           Eigen::MatrixXd::Zero(3, 4), m);
  const auto kl1 = kl_expand(ce.sub1());
  const auto pod = coupled_pod(ce, 1, 0);
  const double sub1_tail = truncate(kl1, 1).discarded_energy();
  CHECK(pod.joint_squared_error ==
        doctest::Approx(sub1_tail).epsilon(1e-12));
}

TEST_CASE("grid layout is recognized and fibre constancy holds") {
  Rng rng(101);
  const auto ce = grid_ce(rng, 3, 4, 5, 2);
  const auto gs = grid_structure(ce);
  CHECK(gs.n1 == 3);
  CHECK(gs.n2 == 4);

  const auto k = coupled_kernel(ce);
  // diag1 entries may only depend on the mu1 block indices.
  double worst = 0.0;
  for (Eigen::Index bi = 0; bi < 3; ++bi)
    for (Eigen::Index bj = 0; bj < 3; ++bj) {
      const double ref = k.diag1(bi * 4, bj * 4);
      for (Eigen::Index ii = 0; ii < 4; ++ii)
        for (Eigen::Index jj = 0; jj < 4; ++jj)
          worst = std::max(
              worst, std::abs(k.diag1(bi * 4 + ii, bj * 4 + jj) - ref));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("non-grid partitioned sampling is rejected") {
  Rng rng(102);
  std::vector<ParameterPoint> pts{{{0.0, 0.0}, ""},
                                  {{0.0, 1.0}, ""},
                                  {{1.0, 0.0}, ""}};  // ragged grid
  const SampledMeasure m(pts, Eigen::Vector3d(1, 1, 1) / 3.0);
  const CoupledEnsemble ce(rng.uniform_matrix(2, 3, -1.0, 1.0),
                           rng.uniform_matrix(2, 3, -1.0, 1.0), m,
                           Partition{{0}, {1}});
  CHECK_THROWS_AS(grid_structure(ce), InputError);
}

TEST_CASE("partition validation") {
  Rng rng(103);
  const auto make = [&](Partition p) {
    std::vector<ParameterPoint> pts{{{0.0, 1.0}, ""}, {{2.0, 3.0}, ""}};
    return CoupledEnsemble(rng.uniform_matrix(2, 2, -1.0, 1.0),
                           rng.uniform_matrix(2, 2, -1.0, 1.0),
                           SampledMeasure(pts, Eigen::Vector2d(0.5, 0.5)),
                           std::move(p));
  };
  CHECK_THROWS_AS(make(Partition{{0}, {0}}), InputError);
  CHECK_THROWS_AS(make(Partition{{0}, {5}}), InputError);
  CHECK_THROWS_AS(make(Partition{{}, {1}}), InputError);
  CHECK_NOTHROW(make(Partition{{0}, {1}}));
}

TEST_CASE("subsystems must share the sample count") {
  Rng rng(104);
  const SampledMeasure m = measure_of(3, Eigen::Vector3d(1, 1, 1));
  CHECK_THROWS_AS(CoupledEnsemble(rng.uniform_matrix(2, 3, -1.0, 1.0),
                                  rng.uniform_matrix(2, 4, -1.0, 1.0), m),
                  InputError);
}
