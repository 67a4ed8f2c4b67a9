#include "paramred/piston.hpp"

#include <cmath>
#include <string>

#include "paramred/errors.hpp"

namespace paramred {

void PistonParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw InputError(std::string("piston: ") + name + " must be positive");
  };
  positive(m, "m");
  positive(k, "k");
  positive(c0, "c0");
  positive(p0, "p0");
  // S = 0 is the decoupled mass-spring limit and stays admissible.
  if (!(S >= 0.0) || !std::isfinite(S))
    throw InputError("piston: S must be nonnegative");
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw InputError("piston: gamma must exceed 1");
}

double gas_law_base(const PistonState& s, const PistonParams& p) {
  return 1.0 + 0.5 * (p.gamma - 1.0) * (s.v / p.c0);
}

double pressure(const PistonState& s, const PistonParams& p) {
  const double base = gas_law_base(s, p);
  if (!(base > 0.0))
    throw GasLawError("piston: gas-law base " + std::to_string(base) +
                      " is not positive (v = " + std::to_string(s.v) + ")");
  return p.p0 * std::pow(base, 2.0 * p.gamma / (p.gamma - 1.0));
}

PistonState rhs(const PistonState& s, const PistonParams& p) {
  const double coupling = p.S * p.p0 / p.m;
  const double base = gas_law_base(s, p);
  if (!(base > 0.0))
    throw GasLawError("piston: gas-law base " + std::to_string(base) +
                      " is not positive (v = " + std::to_string(s.v) + ")");
  const double pressure_term =
      coupling * std::pow(base, 2.0 * p.gamma / (p.gamma - 1.0));
  return PistonState{s.v, -(p.k / p.m) * s.w + pressure_term - coupling};
}

Trajectory integrate(const PistonParams& p, PistonState s0, double T,
                     double dt) {
  p.validate();
  if (!(dt > 0.0)) throw InputError("piston: dt must be positive");
  if (!(T >= dt)) throw InputError("piston: T must be at least dt");
  const auto n_steps = static_cast<Eigen::Index>(std::llround(T / dt));

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.pressures.reserve(static_cast<std::size_t>(n_steps) + 1);

  PistonState s = s0;
  for (Eigen::Index step = 0; step <= n_steps; ++step) {
    const double t = double(step) * dt;
    traj.times.push_back(t);
    traj.states.push_back(s);
    try {
      traj.pressures.push_back(pressure(s, p));
    } catch (const GasLawError& e) {
      throw GasLawError(std::string(e.what()) + " at time " +
                        std::to_string(t));
    }
    if (step == n_steps) break;

    try {
      const PistonState k1 = rhs(s, p);
      const PistonState k2 =
          rhs({s.w + 0.5 * dt * k1.w, s.v + 0.5 * dt * k1.v}, p);
      const PistonState k3 =
          rhs({s.w + 0.5 * dt * k2.w, s.v + 0.5 * dt * k2.v}, p);
      const PistonState k4 = rhs({s.w + dt * k3.w, s.v + dt * k3.v}, p);
      s.w += dt / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
      s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    } catch (const GasLawError& e) {
      throw GasLawError(std::string(e.what()) + " at time " +
                        std::to_string(t));
    }
    if (!std::isfinite(s.w) || !std::isfinite(s.v))
      throw GasLawError("piston: state diverged at time " + std::to_string(t));
  }
  return traj;
}

CoupledEnsemble sample_snapshots(const std::vector<PistonParams>& grid,
                                 PistonState s0, double T, double dt,
                                 Eigen::Index observe_stride) {
  if (grid.empty()) throw InputError("piston: empty parameter grid");
  if (observe_stride < 1)
    throw InputError("piston: observation stride must be at least 1");
  for (const auto& p : grid) p.validate();

  const auto n_steps = static_cast<Eigen::Index>(std::llround(T / dt));
  const Eigen::Index n_obs = n_steps / observe_stride + 1;
  const auto n_grid = static_cast<Eigen::Index>(grid.size());

  Eigen::MatrixXd solid(n_obs, n_grid);
  Eigen::MatrixXd gas(n_obs, n_grid);

  // Grid integrations are independent; column writes do not overlap.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (Eigen::Index g = 0; g < n_grid; ++g) {
    try {
      const Trajectory traj =
          integrate(grid[static_cast<std::size_t>(g)], s0, T, dt);
      for (Eigen::Index o = 0; o < n_obs; ++o) {
        const auto step = static_cast<std::size_t>(o * observe_stride);
        solid(o, g) = traj.states[step].w;
        gas(o, g) = traj.pressures[step];
      }
    } catch (...) {
#pragma omp critical
      if (!failure) {
        try {
          throw;
        } catch (const Error& e) {
          failure = std::make_exception_ptr(
              GasLawError(std::string(e.what()) + " (parameter index " +
                          std::to_string(g) + ")"));
        } catch (...) {
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ParameterPoint> points;
  points.reserve(grid.size());
  for (const auto& p : grid)
    points.push_back(
        ParameterPoint{{p.m, p.k, p.S, p.c0, p.gamma - 1.0}, ""});
  return CoupledEnsemble(std::move(solid), std::move(gas),
                         SampledMeasure::uniform(std::move(points)));
}

}  // namespace paramred
