#include "dicore/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dicore/poisson.hpp"

namespace dicore {

OdeState initial_state(double c, CoreParams p) {
  if (!(c > 0)) throw std::domain_error("initial_state: needs c > 0");
  if (std::min(p.k1, p.k2) < 1 || std::max(p.k1, p.k2) < 2) {
    throw std::domain_error(
        "initial_state: needs min(k1,k2) >= 1 and max(k1,k2) >= 2");
  }
  OdeState st;
  st.s = DetailedState::zeros(p);
  for (int a = 0; a < p.k1; ++a) {
    for (int b = 0; b < p.k2; ++b) {
      st.s.ab(a, b) = poisson_pmf(a, c) * poisson_pmf(b, c);
    }
  }
  for (int a = 0; a < p.k1; ++a) {
    st.s.v_a_dot[a] = poisson_pmf(a, c) * poisson_tail(p.k2, c);
  }
  for (int b = 0; b < p.k2; ++b) {
    st.s.v_dot_b[b] = poisson_tail(p.k1, c) * poisson_pmf(b, c);
  }
  st.s.v = poisson_tail(p.k1, c) * poisson_tail(p.k2, c);
  st.s.mu = c;
  st.z_i = c;
  st.z_o = c;
  return st;
}

namespace {

// Drift per unit physical time given the recovered tilt parameters.
// One deletion removes a uniform vertex from the light pool L; its
// expected in/out arc stubs are Ei/L and Eo/L, and each removed arc
// decrements the degree of a stub chosen uniformly among the mu
// surviving stubs on the opposite side.
DetailedState rhs_given_z(const DetailedState& s, double zi, double zo) {
  const int k1 = s.k1, k2 = s.k2;
  const double L = s.light();
  const double mu = s.mu;
  const double vi = s.v_i(), vo = s.v_o();
  const double Ei = s.mu_i() + psi(k1, zi) * (vi - s.v);
  const double Eo = s.mu_o() + psi(k2, zo) * (vo - s.v);
  // Probability that a heavy side sits exactly at its threshold degree.
  const double pzi = poisson_pmf(k1, zi) / poisson_tail(k1, zi);
  const double pzo = poisson_pmf(k2, zo) / poisson_tail(k2, zo);
  const double qa = Eo / (L * mu);  // in-degree decrement rate per stub
  const double qb = Ei / (L * mu);  // out-degree decrement rate per stub

  // Density of class (a, b) with either index allowed to touch the
  // threshold border, where the truncated-Poisson pzi/pzo factors peel
  // the boundary layer off the heavy blocks.
  auto vab = [&](int a, int b) {
    if (a == k1) return s.v_dot_b[b] * pzi;
    if (b == k2) return s.v_a_dot[a] * pzo;
    return s.ab(a, b);
  };

  DetailedState d = DetailedState::zeros({k1, k2});
  for (int a = 0; a < k1; ++a) {
    for (int b = 0; b < k2; ++b) {
      double acc = (a == 0 && b == 0) ? 1.0 : -s.ab(a, b) / L;
      acc += qa * ((a + 1) * vab(a + 1, b) - a * s.ab(a, b));
      acc += qb * ((b + 1) * vab(a, b + 1) - b * s.ab(a, b));
      d.ab(a, b) = acc;
    }
  }
  for (int a = 0; a < k1; ++a) {
    double up = (a + 1 == k1) ? s.v * pzi : s.v_a_dot[a + 1];
    d.v_a_dot[a] = -s.v_a_dot[a] / L +
                   qa * ((a + 1) * up - a * s.v_a_dot[a]) -
                   qb * k2 * s.v_a_dot[a] * pzo;
  }
  for (int b = 0; b < k2; ++b) {
    double up = (b + 1 == k2) ? s.v * pzo : s.v_dot_b[b + 1];
    d.v_dot_b[b] = -s.v_dot_b[b] / L +
                   qb * ((b + 1) * up - b * s.v_dot_b[b]) -
                   qa * k1 * s.v_dot_b[b] * pzi;
  }
  d.v = -qa * k1 * pzi * s.v - qb * k2 * pzo * s.v;
  d.mu = -Ei / L - Eo / L;
  return d;
}

// Recover z from psi_k(z) = target, preferring a Newton iteration from
// the previous accepted value; d psi/dz = trunc_var / z.
double invert_psi_warm(int k, double target, double guess) {
  if (k <= 0) return target;
  double z = guess;
  if (!(z > 0) || !std::isfinite(z)) z = std::max(target - k, 1e-8);
  for (int it = 0; it < 25; ++it) {
    double f = psi(k, z) - target;
    if (std::fabs(f) <= 1e-13 * target) return z;
    double d = trunc_var(k, z) / z;
    if (!(d > 0)) break;
    double zn = z - f / d;
    if (!(zn > 0) || !std::isfinite(zn)) break;
    z = zn;
  }
  if (z > 0 && std::isfinite(z) &&
      std::fabs(psi(k, z) - target) <= 1e-12 * target) {
    return z;
  }
  return invert_psi(k, target);
}

struct Inversion {
  double z_i, z_o;
};

Inversion recover_z(const DetailedState& s, double wi, double wo) {
  double vi = s.v_i(), vo = s.v_o();
  if (!(vi > 0) || !(vo > 0)) {
    throw std::domain_error("ode: heavy-side mass vanished");
  }
  double ti = (s.mu - s.mu_i()) / vi;
  double to = (s.mu - s.mu_o()) / vo;
  if (!(ti > s.k1) || !(to > s.k2)) {
    throw std::domain_error("ode: z-inversion infeasible");
  }
  return {invert_psi_warm(s.k1, ti, wi), invert_psi_warm(s.k2, to, wo)};
}

TrajectoryRow make_row(const DetailedState& s, double t, double zi,
                       double zo) {
  TrajectoryRow r;
  r.t = t;
  r.z_i = zi;
  r.z_o = zo;
  r.v = s.v;
  r.mu = s.mu;
  r.mu_i = s.mu_i();
  r.mu_o = s.mu_o();
  r.v_i = s.v_i();
  r.v_o = s.v_o();
  r.light = s.light();
  r.phi1 = zi * zo / s.mu;
  r.phi2 = poisson_tail(s.k1, zi) * poisson_tail(s.k2, zo) / s.v;
  return r;
}

}  // namespace

DetailedState rhs(const OdeState& st) {
  const DetailedState& s = st.s;
  if (!(s.light() > 0)) throw std::domain_error("rhs: no light mass");
  Inversion z = recover_z(s, st.z_i, st.z_o);
  return rhs_given_z(s, z.z_i, z.z_o);
}

OdeOutcome integrate(double c, CoreParams p, const OdeOptions& opts) {
  OdeState st0 = initial_state(c, p);
  const int k1 = p.k1, k2 = p.k2;
  const size_t nab = static_cast<size_t>(k1) * k2;
  const size_t D = nab + k1 + k2 + 3;  // classes, v, mu, physical time

  auto flatten = [&](const DetailedState& s, double t, std::vector<double>& y) {
    size_t j = 0;
    for (size_t i = 0; i < nab; ++i) y[j++] = s.v_ab[i];
    for (int a = 0; a < k1; ++a) y[j++] = s.v_a_dot[a];
    for (int b = 0; b < k2; ++b) y[j++] = s.v_dot_b[b];
    y[j++] = s.v;
    y[j++] = s.mu;
    y[j++] = t;
  };
  auto unflatten = [&](const std::vector<double>& y, DetailedState& s,
                       double& t) {
    size_t j = 0;
    for (size_t i = 0; i < nab; ++i) s.v_ab[i] = y[j++];
    for (int a = 0; a < k1; ++a) s.v_a_dot[a] = y[j++];
    for (int b = 0; b < k2; ++b) s.v_dot_b[b] = y[j++];
    s.v = y[j++];
    s.mu = y[j++];
    t = y[j++];
  };

  DetailedState scratch = DetailedState::zeros(p);
  double warm_zi = c, warm_zo = c;
  // Rescaled-time derivative dy/dsigma = L * f_phys(y), dt/dsigma = L.
  auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
    double t;
    unflatten(y, scratch, t);
    double L = scratch.light();
    if (!(L > 0)) throw std::domain_error("ode: light mass exhausted");
    if (!(scratch.mu > 0)) throw std::domain_error("ode: no arcs left");
    Inversion z = recover_z(scratch, warm_zi, warm_zo);
    warm_zi = z.z_i;
    warm_zo = z.z_o;
    DetailedState d = rhs_given_z(scratch, z.z_i, z.z_o);
    flatten(d, 1.0, dy);
    for (size_t i = 0; i + 1 < D; ++i) dy[i] *= L;
    dy[D - 1] = L;
    for (double x : dy) {
      if (!std::isfinite(x)) throw std::domain_error("ode: non-finite drift");
    }
  };

  // Dormand-Prince 5(4) tableau.
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
       11.0 / 84}};
  static const double E[7] = {71.0 / 57600,     0.0,          -71.0 / 16695,
                              71.0 / 1920,      -17253.0 / 339200,
                              22.0 / 525,       -1.0 / 40};

  OdeOutcome out;
  std::vector<double> y(D), ynew(D), yerr(D), stage(D);
  std::vector<std::vector<double>> K(7, std::vector<double>(D));
  flatten(st0.s, 0.0, y);

  // Sampling with stride doubling: always keeps the initial row.
  size_t stride = 1, accepted = 0;
  auto record = [&](const TrajectoryRow& row, const OdeState& st) {
    out.trajectory.push_back(row);
    if (opts.record_states) out.states.push_back(st);
    if (out.trajectory.size() >= opts.max_samples &&
        opts.max_samples >= 2) {
      size_t w = 0;
      for (size_t i = 0; i < out.trajectory.size(); i += 2) {
        out.trajectory[w] = out.trajectory[i];
        if (opts.record_states) out.states[w] = out.states[i];
        ++w;
      }
      out.trajectory.resize(w);
      if (opts.record_states) out.states.resize(w);
      stride *= 2;
    }
  };
  record(make_row(st0.s, 0.0, c, c), st0);

  double h = 1e-4, sigma = 0.0;
  bool have_k0 = false;
  DetailedState cur = DetailedState::zeros(p);
  double tcur = 0.0;
  OdeVerdict verdict = OdeVerdict::StepLimit;
  uint64_t attempts = 0;

  for (;;) {
    double t;
    unflatten(y, cur, t);
    tcur = t;
    double L = cur.light();
    if (L < opts.stop_light) {
      verdict = cur.v > opts.v_floor ? OdeVerdict::TerminatedSupercritical
                                     : OdeVerdict::CollapsedSubcritical;
      break;
    }
    if (cur.v < opts.v_floor) {
      verdict = OdeVerdict::CollapsedSubcritical;
      break;
    }
    if (attempts >= opts.max_steps) {
      verdict = OdeVerdict::StepLimit;
      break;
    }
    if (h < 1e-15 * std::max(1.0, sigma)) {
      verdict = OdeVerdict::StepLimit;
      break;
    }
    ++attempts;

    bool stage_ok = true;
    try {
      if (!have_k0) {
        deriv(y, K[0]);
        have_k0 = true;
      }
      for (int s = 1; s < 7; ++s) {
        for (size_t i = 0; i < D; ++i) {
          double acc = 0;
          for (int j = 0; j < s; ++j) acc += A[s][j] * K[j][i];
          stage[i] = y[i] + h * acc;
        }
        deriv(stage, K[s]);
      }
    } catch (const std::domain_error&) {
      stage_ok = false;
    }
    if (!stage_ok) {
      h /= 2;
      continue;
    }

    // Stage 7 is evaluated at the 5th-order solution itself, so ynew is
    // the last stage point and K[6] seeds the next step (FSAL).
    for (size_t i = 0; i < D; ++i) {
      ynew[i] = stage[i];
      double e = 0;
      for (int j = 0; j < 7; ++j) e += E[j] * K[j][i];
      yerr[i] = h * e;
    }
    double err = 0;
    for (size_t i = 0; i < D; ++i) {
      double sc =
          opts.abs_tol + opts.rel_tol * std::max(std::fabs(y[i]),
                                                 std::fabs(ynew[i]));
      double q = yerr[i] / sc;
      err += q * q;
    }
    err = std::sqrt(err / static_cast<double>(D));

    if (err <= 1.0) {
      bool clean = true;
      for (size_t i = 0; i + 1 < D; ++i) {
        if (ynew[i] < -1e-9) {
          clean = false;
          break;
        }
        if (ynew[i] < 0) ynew[i] = 0;
      }
      if (!clean) {
        h /= 2;
        continue;
      }
      sigma += h;
      y.swap(ynew);
      K[0].swap(K[6]);  // FSAL
      ++accepted;
      if (accepted % stride == 0) {
        double tr;
        unflatten(y, cur, tr);
        try {
          Inversion z = recover_z(cur, warm_zi, warm_zo);
          record(make_row(cur, tr, z.z_i, z.z_o), OdeState{cur, z.z_i, z.z_o});
        } catch (const std::domain_error&) {
          // Sampling is best effort; the stop checks handle the state.
        }
      }
    } else {
      have_k0 = true;  // base derivative is still valid
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    if (err > 1.0) fac = std::min(fac, 1.0);
    h *= fac;
  }

  // Terminal state and row.
  double zi_end = warm_zi, zo_end = warm_zo;
  try {
    Inversion z = recover_z(cur, warm_zi, warm_zo);
    zi_end = z.z_i;
    zo_end = z.z_o;
  } catch (const std::domain_error&) {
  }
  out.verdict = verdict;
  out.terminal_state = OdeState{cur, zi_end, zo_end};
  out.terminal_time = tcur;
  out.steps = accepted;
  if (out.trajectory.empty() || out.trajectory.back().t != tcur) {
    out.trajectory.push_back(make_row(cur, tcur, zi_end, zo_end));
    if (opts.record_states) out.states.push_back(out.terminal_state);
  }
  auto drift = conservation_report(out.trajectory);
  out.phi1_drift = drift.first;
  out.phi2_drift = drift.second;
  return out;
}

std::pair<double, double> conservation_report(
    const std::vector<TrajectoryRow>& rows) {
  if (rows.size() < 2) return {0.0, 0.0};
  double p1 = rows.front().phi1, p2 = rows.front().phi2;
  double d1 = 0, d2 = 0;
  for (const auto& r : rows) {
    d1 = std::max(d1, std::fabs(r.phi1 / p1 - 1.0));
    d2 = std::max(d2, std::fabs(r.phi2 / p2 - 1.0));
  }
  return {d1, d2};
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows) {
  out << "t,z_i,z_o,v,mu,mu_i,mu_o,v_i,v_o,L,phi1,phi2\n";
  char buf[400];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g\n",
                  r.t, r.z_i, r.z_o, r.v, r.mu, r.mu_i, r.mu_o, r.v_i, r.v_o,
                  r.light, r.phi1, r.phi2);
    out << buf;
  }
}

}
