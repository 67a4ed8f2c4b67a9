#ifndef PARAMRED_RNG_HPP
#define PARAMRED_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace paramred {

/// Deterministic random source for tests and report audits.
///
/// Wraps mt19937_64 but derives doubles directly from the raw stream, so a
/// given seed produces the same sequence on every platform (the standard
/// library distributions make no such guarantee).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Modulo bias is irrelevant for the small n used here.
    return engine_() % n;
  }

  // Standard normal via Box-Muller on the deterministic uniform stream.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols,
                                 double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(lo, hi);
    return m;
  }

  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace paramred

#endif  // PARAMRED_RNG_HPP
