#include "dicore/poisson.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_rate(double z) {
  if (!(z >= 0.0)) throw std::domain_error("poisson rate must be >= 0");
}

// Sum of the tail series p_k(z) = pmf(k,z) * (1 + z/(k+1) + ...),
// valid and cancellation-free for z < k. Returns the bracketed factor.
double tail_series_factor(int k, double z) {
  double sum = 1.0, term = 1.0;
  for (int j = k + 1;; ++j) {
    term *= z / j;
    sum += term;
    if (term < 1e-18 * sum && j > z) break;
  }
  return sum;
}

// Head sum P(Poisson(z) <= k-1) by the pmf recurrence; fine for z well
// below the exp underflow limit (all uses have z <= a few hundred).
double head_sum(int k, double z) {
  double term = std::exp(-z);
  double sum = term;
  for (int j = 1; j < k; ++j) {
    term *= z / j;
    sum += term;
  }
  return sum;
}

}  // namespace

double log_poisson_pmf(int j, double z) {
  require_rate(z);
  if (j < 0) return kNegInf;
  if (z == 0.0) return j == 0 ? 0.0 : kNegInf;
  return j * std::log(z) - z - std::lgamma(j + 1.0);
}

double poisson_pmf(int j, double z) {
  require_rate(z);
  if (j < 0) return 0.0;
  if (z == 0.0) return j == 0 ? 1.0 : 0.0;
  return std::exp(log_poisson_pmf(j, z));
}

double log_poisson_tail(int k, double z) {
  require_rate(z);
  if (k <= 0) return 0.0;
  if (z == 0.0) return kNegInf;
  if (z < k) {
    return log_poisson_pmf(k, z) + std::log(tail_series_factor(k, z));
  }
  // z >= k >= 1: the head is at most ~1/2, so 1 - head keeps precision.
  return std::log1p(-head_sum(k, z));
}

double poisson_tail(int k, double z) {
  require_rate(z);
  if (k <= 0) return 1.0;
  if (z == 0.0) return 0.0;
  if (z < k) {
    return poisson_pmf(k, z) * tail_series_factor(k, z);
  }
  // z >= k: the head is bounded near 1/2, so direct subtraction is safe.
  return 1.0 - head_sum(k, z);
}

double psi(int k, double z) {
  require_rate(z);
  if (k <= 0) return z;
  if (z == 0.0) return static_cast<double>(k);
  return z * std::exp(log_poisson_tail(k - 1, z) - log_poisson_tail(k, z));
}

double phi(int r, double z) {
  require_rate(z);
  if (r <= 0) return 0.0;
  if (z == 0.0) return static_cast<double>(r);
  return std::exp(std::log(z) + log_poisson_pmf(r - 1, z) -
                  log_poisson_tail(r, z));
}

double trunc_var(int k, double z) {
  require_rate(z);
  if (z == 0.0) return 0.0;
  return psi(k, z) * (1.0 - phi(k, z) + phi(k - 1, z));
}

double invert_psi(int k, double target) {
  if (k <= 0) return target;
  if (!(target > k)) {
    throw std::domain_error("invert_psi: target must exceed k");
  }
  // psi_k(z) is strictly increasing from k to infinity with
  // max(k, z) <= psi_k(z) <= k + z, so [ (target-k) * 1e-3, target ]
  // always brackets the root; the expansion loops are safeguards.
  double lo = std::max(target - k, 1e-12) * 1e-3;
  double hi = target;
  for (int i = 0; i < 200 && psi(k, lo) >= target; ++i) lo *= 0.5;
  for (int i = 0; i < 200 && psi(k, hi) < target; ++i) hi *= 2.0;
  for (int i = 0; i < 100 && (hi - lo) > 1e-13 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (psi(k, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  // Newton polish with d psi/dz = trunc_var/z.
  for (int i = 0; i < 3; ++i) {
    double f = psi(k, z) - target;
    double d = trunc_var(k, z) / z;
    if (d <= 0.0) break;
    double step = f / d;
    double nz = z - step;
    if (!(nz > 0.0) || !std::isfinite(nz)) break;
    z = nz;
  }
  return z;
}

}
