#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "dicore/detailed_state.hpp"
#include "dicore/threshold.hpp"

namespace dicore {

// Continuum state: DetailedState scaled to per-vertex fractions, plus
// the cached tilt parameters recovered from it via
//   psi_{k1}(z_i) = (mu - mu_i) / v_i,  psi_{k2}(z_o) = (mu - mu_o) / v_o.
struct OdeState {
  DetailedState s;
  double z_i = 0;
  double z_o = 0;
};

// One sampled trajectory point, physical time first.
struct TrajectoryRow {
  double t = 0;
  double z_i = 0, z_o = 0;
  double v = 0, mu = 0;
  double mu_i = 0, mu_o = 0;
  double v_i = 0, v_o = 0;
  double light = 0;
  double phi1 = 0, phi2 = 0;  // z_i z_o / mu and p_{k1}(z_i) p_{k2}(z_o) / v
};

enum class OdeVerdict { TerminatedSupercritical, CollapsedSubcritical, StepLimit };

// The absolute floor sits below rel_tol * v_floor so that collapsing
// components stay under relative control all the way to the stop
// thresholds; otherwise the conserved ratios drift in the endgame.
struct OdeOptions {
  double rel_tol = 2e-10;
  double abs_tol = 1e-19;
  double stop_light = 1e-9;  // terminate when the light mass falls below
  double v_floor = 1e-9;     // terminate when the heavy mass falls below
  uint64_t max_steps = 1000000;
  size_t max_samples = 10000;
  bool record_states = false;  // keep full OdeState at every sample
};

struct OdeOutcome {
  OdeVerdict verdict = OdeVerdict::StepLimit;
  OdeState terminal_state;
  double terminal_time = 0;
  std::vector<TrajectoryRow> trajectory;
  std::vector<OdeState> states;  // only when record_states
  double phi1_drift = 0;
  double phi2_drift = 0;
  uint64_t steps = 0;
};

// Poissonized start at arc density c: independent Poisson(c) in- and
// out-degrees, total vertex mass 1. Requires min(k1,k2) >= 1 and
// max(k1,k2) >= 2 (the k = 0 formulas below degenerate).
OdeState initial_state(double c, CoreParams p);

// Drift of the deletion chain per unit physical time (one deletion step
// is dt = 1/n). Throws std::domain_error when the state has no light
// mass or the z-inversion is infeasible.
DetailedState rhs(const OdeState& st);

// Integrates from initial_state(c) in the rescaled time d(sigma) = dt/L
// until the light mass is exhausted (supercritical), the heavy mass
// collapses (subcritical), or a step/feasibility guard trips.
OdeOutcome integrate(double c, CoreParams p, const OdeOptions& opts = {});

// Max relative drift of the two conserved quantities along a
// trajectory: (max |phi1/phi1(0) - 1|, max |phi2/phi2(0) - 1|).
std::pair<double, double> conservation_report(
    const std::vector<TrajectoryRow>& rows);

// CSV with header t,z_i,z_o,v,mu,mu_i,mu_o,v_i,v_o,L,phi1,phi2 and 17
// significant digits per field.
void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows);

}
