// Timing comparison of the serial reference kernels against the OpenMP
// versions. Not part of the test suite; run manually:
//   ./build/bench/bench_kernels [size_scale]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "paramred/kernels.hpp"
#include "paramred/piston.hpp"
#include "paramred/rng.hpp"

namespace {

using paramred::Rng;

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    f();
    const double t1 = omp_get_wtime();
    if (t1 - t0 < best) best = t1 - t0;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %10.4f ms   omp %10.4f ms   speedup %.2fx\n",
              name, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  const Eigen::Index d = 384 * scale;
  const Eigen::Index n = 512 * scale;
  std::printf("threads: %d, snapshot matrix %ld x %ld\n", omp_get_max_threads(),
              long(d), long(n));

  Rng rng(7);
  const Eigen::MatrixXd a = rng.uniform_matrix(d, n, -1.0, 1.0);
  const Eigen::VectorXd w = rng.uniform_vector(n, 0.1, 1.0);

  namespace pk = paramred::kernels;

  report("correlation",
         time_best_of(3, [&] { volatile double x = pk::serial::weighted_outer_sum(a, w)(0, 0); (void)x; }),
         time_best_of(3, [&] { volatile double x = pk::weighted_outer_sum(a, w)(0, 0); (void)x; }));

  report("gram",
         time_best_of(3, [&] { volatile double x = pk::serial::gram_matrix(a)(0, 0); (void)x; }),
         time_best_of(3, [&] { volatile double x = pk::gram_matrix(a)(0, 0); (void)x; }));

  // Block kernel: a few vector-valued components at moderate sample count.
  const Eigen::Index nb = 96 * scale;
  std::vector<Eigen::MatrixXd> comps;
  for (int k = 0; k < 3; ++k) comps.push_back(rng.uniform_matrix(d, nb, -1.0, 1.0));
  std::vector<std::vector<Eigen::MatrixXd>> factors(3);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      factors[static_cast<std::size_t>(k)].push_back(rng.uniform_matrix(4, 4, -1.0, 1.0));

  report("block_kernel",
         time_best_of(3, [&] { volatile double x = pk::serial::block_kernel(comps, factors)(0, 0); (void)x; }),
         time_best_of(3, [&] { volatile double x = pk::block_kernel(comps, factors)(0, 0); (void)x; }));

  // Parameter-sweep integration (piston grid).
  std::vector<paramred::PistonParams> grid;
  for (int i = 0; i < 24 * scale; ++i)
    grid.push_back({1.0, 0.5 + 0.1 * i, 0.1, 10.0, 1.4, 1.0});
  const double t_serial = time_best_of(1, [&] {
    for (const auto& p : grid)
      paramred::integrate(p, {1.0, 0.0}, 10.0, 1e-3);
  });
  const double t_par = time_best_of(1, [&] {
    paramred::sample_snapshots(grid, {1.0, 0.0}, 10.0, 1e-3, 100);
  });
  report("piston_sweep", t_serial, t_par);
  return 0;
}
