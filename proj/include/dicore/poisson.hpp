#pragma once

// Poisson tail kernels. Everything downstream (threshold solving, the
// deletion ODE, degree bookkeeping) is built from these four quantities:
//
//   poisson_tail(k,z)  = P(Poisson(z) >= k)            (== 1 for k <= 0)
//   poisson_pmf(j,z)   = P(Poisson(z) == j)
//   psi(k,z)           = z * tail(k-1,z) / tail(k,z)
//                        mean of the tilted law, strictly increasing in z
//   phi(r,z)           = z * pmf(r-1,z) / tail(r,z)    (== 0 for r <= 0)
//                        boundary mass ratio, strictly decreasing in z
//
// psi(k,.) maps (0,inf) onto (k,inf); invert_psi is its inverse.
// All routines work in log space internally so ratios stay accurate for
// z far below k (tails down to ~1e-300 keep full relative precision).

namespace dicore {

double poisson_pmf(int j, double z);
double poisson_tail(int k, double z);

// log P(Poisson(z) == j) and log P(Poisson(z) >= k); -inf when the mass
// is exactly zero.
double log_poisson_pmf(int j, double z);
double log_poisson_tail(int k, double z);

// psi(k,0) := k and phi(r,0) := r, the continuous extensions.
double psi(int k, double z);
double phi(int r, double z);

// Variance of the tilted law: psi(k,z) * (1 - phi(k,z) + phi(k-1,z)).
// Equals z * d/dz psi(k,z).
double trunc_var(int k, double z);

// Unique z with psi(k,z) == target, for target > k (throws otherwise).
// Relative accuracy 1e-10 or better.
double invert_psi(int k, double target);

}
