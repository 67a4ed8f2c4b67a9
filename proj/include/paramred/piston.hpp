#ifndef PARAMRED_PISTON_HPP
#define PARAMRED_PISTON_HPP

#include <vector>

#include "paramred/coupled.hpp"

namespace paramred {

/// Mass-spring system coupled to a gas-filled piston:
///   m w'' + k w = S (p - p0),
///   p = p0 (1 + (gamma-1)/2 * w'/c0)^(2gamma/(gamma-1)).
/// The parameter vector is mu = (m, k, S, c0, gamma-1); the equilibrium
/// pressure p0 is a fixed configuration constant.
struct PistonParams {
  double m;
  double k;
  double S;
  double c0;
  double gamma;
  double p0 = 1.0;

  void validate() const;
};

struct PistonState {
  double w;
  double v;
};

/// 1 + (gamma-1)/2 * v/c0; the gas law requires this to stay positive.
double gas_law_base(const PistonState& s, const PistonParams& p);

/// p(t) = p0 * base^(2gamma/(gamma-1)). Throws GasLawError when the base
/// is not positive.
double pressure(const PistonState& s, const PistonParams& p);

/// Right-hand side (w', v') of the first-order system.
PistonState rhs(const PistonState& s, const PistonParams& p);

struct Trajectory {
  std::vector<double> times;
  std::vector<PistonState> states;
  std::vector<double> pressures;  // one per stored state
};

/// Classical fixed-step RK4 from t = 0 to T, states stored at every step.
/// A non-positive gas-law base at any stage aborts with the offending time.
Trajectory integrate(const PistonParams& p, PistonState s0, double T,
                     double dt);

/// Runs the grid of parameter points and collects, per point, the
/// displacement trajectory (subsystem 1, solid) and the pressure
/// trajectory (subsystem 2, gas) at steps 0, stride, 2*stride, ....
/// Weights are uniform 1/N; parameter coordinates are (m, k, S, c0,
/// gamma-1).
CoupledEnsemble sample_snapshots(const std::vector<PistonParams>& grid,
                                 PistonState s0, double T, double dt,
                                 Eigen::Index observe_stride);

}  // namespace paramred

#endif  // PARAMRED_PISTON_HPP
