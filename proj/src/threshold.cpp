#include "dicore/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "dicore/log.hpp"
#include "dicore/poisson.hpp"

namespace dicore {

namespace {

CoreParams clamped(CoreParams p) {
  return {std::max(p.k1, 0), std::max(p.k2, 0)};
}

// Objective branches. p_k with k <= 0 is identically 1, so the
// degenerate parameter values fall out of the same expressions.
double branch_i(CoreParams p, double z_i, double z_o) {
  return z_i / (poisson_tail(p.k1, z_i) * poisson_tail(p.k2 - 1, z_o));
}

double branch_o(CoreParams p, double z_i, double z_o) {
  return z_o / (poisson_tail(p.k2, z_o) * poisson_tail(p.k1 - 1, z_i));
}

// Root of phi_k(z) = 1 (k >= 2): phi_k decreases from k to 0.
double solve_phi_equals_one(int k) {
  double lo = 1e-9;
  double hi = static_cast<double>(k);
  for (int i = 0; i < 200 && phi(k, hi) >= 1.0; ++i) hi *= 1.5;
  for (int i = 0; i < 100 && (hi - lo) > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (phi(k, mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ThresholdResult compute_cstar_uncached(CoreParams p) {
  const int k1 = p.k1, k2 = p.k2;
  const int kmax = std::max(k1, k2), kmin = std::min(k1, k2);
  ThresholdResult r;

  if (kmin <= 1) {
    // One side is unconstrained (or nearly so): the minimum sits where
    // phi_kmax hits 1, and the other coordinate follows the constraint
    // curve psi_kmin(z) = psi_kmax(z*).
    double zmax = solve_phi_equals_one(kmax);
    double zmin = invert_psi(kmin, psi(kmax, zmax));
    double zi = (k1 == kmax) ? zmax : zmin;
    double zo = (k1 == kmax) ? zmin : zmax;
    r.c_star = std::max(branch_i(p, zi, zo), branch_o(p, zi, zo));
    r.z_i_star = zi;
    r.z_o_star = zo;
  } else {
    // Both sides matter: bisect the stationarity function H along the
    // constraint curve. Infeasible z_i (psi_{k1}(z_i) <= k2) belongs to
    // the H < 0 side, as does the feasibility edge itself, so the
    // bracket below always starts negative.
    auto g = [&](double zi) {
      double t = psi(k1, zi);
      if (t <= k2 * (1.0 + 1e-12) + 1e-12) return -1.0;
      double zo = invert_psi(k2, t);
      return big_h(p, zi, zo);
    };
    double lo = (k2 >= k1) ? invert_psi(k1, k2 + 1e-6) : 1e-6;
    if (g(lo) >= 0.0) {
      throw std::logic_error("threshold bracket: lower end not negative");
    }
    double hi = k1 + k2 + 10.0 * std::sqrt(static_cast<double>(k1 + k2)) + 10.0;
    for (int i = 0; i < 60 && g(hi) <= 0.0; ++i) hi *= 2.0;
    if (g(hi) <= 0.0) {
      throw std::logic_error("threshold bracket: upper end not positive");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      if (g(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double zi = 0.5 * (lo + hi);
    double zo = constraint_zo(p, zi);
    if (phi(k1, zi) >= 1.0 || phi(k2, zo) >= 1.0) {
      throw std::logic_error("threshold minimizer failed validity check");
    }
    r.c_star = std::max(branch_i(p, zi, zo), branch_o(p, zi, zo));
    r.z_i_star = zi;
    r.z_o_star = zo;
  }
  r.beta_at_threshold =
      poisson_tail(k1, r.z_i_star) * poisson_tail(k2, r.z_o_star);
  return r;
}

}  // namespace

double big_h(CoreParams p, double z_i, double z_o) {
  p = clamped(p);
  return (1.0 - phi(p.k1, z_i)) * (1.0 - phi(p.k2, z_o)) -
         phi(p.k1 - 1, z_i) * phi(p.k2 - 1, z_o);
}

double psi_objective(CoreParams p, double z_i, double z_o) {
  p = clamped(p);
  return std::max(branch_i(p, z_i, z_o), branch_o(p, z_i, z_o));
}

double constraint_zo(CoreParams p, double z_i) {
  p = clamped(p);
  double t = psi(p.k1, z_i);
  if (p.k2 >= 1 && t <= p.k2) {
    throw std::domain_error("constraint_zo: no root at this z_i");
  }
  return invert_psi(p.k2, t);
}

ThresholdResult compute_cstar(CoreParams p) {
  p = clamped(p);
  if (std::max(p.k1, p.k2) < 2) {
    throw std::domain_error(
        "compute_cstar: needs max(k1,k2) >= 2, the remaining cores are "
        "trivial or appear at m/n -> 0");
  }
  static std::mutex mtx;
  static std::map<std::pair<int, int>, ThresholdResult> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(p.k1, p.k2);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  ThresholdResult r = compute_cstar_uncached(p);
  cache.emplace(key, r);
  return r;
}

FixedPointOutcome fixed_point(double c, CoreParams p) {
  p = clamped(p);
  if (!(c > 0.0)) throw std::domain_error("fixed_point: c must be positive");
  if (std::max(p.k1, p.k2) < 2) {
    throw std::domain_error("fixed_point: needs max(k1,k2) >= 2");
  }
  ThresholdResult thr = compute_cstar(p);
  FixedPointOutcome out;
  if (std::fabs(c - thr.c_star) < 1e-9) {
    // Within solver accuracy of the threshold: return its fixed point
    // rather than asking the iteration to resolve the tangency.
    out.verdict = FixedPointVerdict::Supercritical;
    out.z_i = thr.z_i_star;
    out.z_o = thr.z_o_star;
    out.beta = thr.beta_at_threshold;
    out.core_edge_per_vertex = out.z_i * out.z_o / c;
    out.iterations = 0;
    return out;
  }

  const double collapse_floor = 1e-6;
  const long max_iter = 100000;
  double zi = c, zo = c;
  for (long r = 1; r <= max_iter; ++r) {
    double ni = c * poisson_tail(p.k1, zi) * poisson_tail(p.k2 - 1, zo);
    double no = c * poisson_tail(p.k1 - 1, zi) * poisson_tail(p.k2, zo);
    if (ni > zi + 1e-12 * (1.0 + zi) || no > zo + 1e-12 * (1.0 + zo)) {
      throw std::logic_error("fixed_point: iteration not monotone");
    }
    double step = std::max(std::fabs(ni - zi), std::fabs(no - zo));
    zi = ni;
    zo = no;
    if (std::min(zi, zo) < collapse_floor) {
      out.verdict = FixedPointVerdict::Subcritical;
      out.iterations = r;
      return out;
    }
    if (step < 1e-12) {
      out.verdict = FixedPointVerdict::Supercritical;
      out.z_i = zi;
      out.z_o = zo;
      out.beta = poisson_tail(p.k1, zi) * poisson_tail(p.k2, zo);
      out.core_edge_per_vertex = zi * zo / c;
      out.iterations = r;
      return out;
    }
  }
  log_debug("fixed_point: iteration cap reached, declaring subcritical");
  out.verdict = FixedPointVerdict::Subcritical;
  out.iterations = max_iter;
  return out;
}

CorePrediction predict_core(double c, CoreParams p, double n) {
  FixedPointOutcome fp = fixed_point(c, p);
  CorePrediction out;
  if (fp.verdict == FixedPointVerdict::Subcritical) return out;
  out.nonempty = true;
  out.vertices = fp.beta * n;
  out.arcs = fp.core_edge_per_vertex * n;
  return out;
}

double alpha_bound(int k, double c) {
  if (k < 2) throw std::domain_error("alpha_bound: needs k >= 2");
  if (!(c > 0.0)) throw std::domain_error("alpha_bound: c must be positive");
  double b1 = std::exp((k + 1.0 + k * std::log(c) - k * std::log(k)) /
                       (k - 1.0));
  double b2 = k / (c * M_E);
  return std::min(b1, b2);
}

std::optional<double> asymptotic_cstar(int k, AsymptoticVariant variant) {
  if (k < 2) throw std::domain_error("asymptotic_cstar: needs k >= 2");
  double arg = (variant == AsymptoticVariant::Diagonal)
                   ? k * M_E * M_E / (2.0 * M_PI)
                   : k / (2.0 * M_PI);
  double l = std::log(arg);
  if (l < 0.0) return std::nullopt;
  return k + std::sqrt(k * l) - 1.0;
}

}
