#pragma once

#include <optional>

namespace dicore {

// Degree bounds of the core: in-degree >= k1, out-degree >= k2.
struct CoreParams {
  int k1 = 0;
  int k2 = 0;
};

// Threshold arc density c* and the minimizing pair (z_i*, z_o*) of
//
//   Psi(z_i, z_o) = max( z_i / (p_{k1}(z_i) p_{k2-1}(z_o)),
//                        z_o / (p_{k2}(z_o) p_{k1-1}(z_i)) )
//
// where p_k(z) = poisson_tail(k,z). beta_at_threshold is
// p_{k1}(z_i*) p_{k2}(z_o*), the limiting core vertex fraction as the
// density crosses c* from above.
struct ThresholdResult {
  double c_star = 0;
  double z_i_star = 0;
  double z_o_star = 0;
  double beta_at_threshold = 0;
};

enum class FixedPointVerdict { Supercritical, Subcritical };

// Limit of the monotone iteration
//   z_i <- c p_{k1}(z_i) p_{k2-1}(z_o),  z_o <- c p_{k1-1}(z_i) p_{k2}(z_o)
// started from z_i = z_o = c. Supercritical: largest solution of the
// system; beta = p_{k1}(z_i) p_{k2}(z_o) is the core vertex fraction and
// core_edge_per_vertex = z_i z_o / c the core arc count per vertex.
struct FixedPointOutcome {
  FixedPointVerdict verdict = FixedPointVerdict::Subcritical;
  double z_i = 0;
  double z_o = 0;
  double beta = 0;
  double core_edge_per_vertex = 0;
  long iterations = 0;
};

struct CorePrediction {
  bool nonempty = false;
  double vertices = 0;
  double arcs = 0;
};

// First-order optimality function for Psi on the constraint curve:
//   H = (1 - phi_{k1}(z_i))(1 - phi_{k2}(z_o))
//       - phi_{k1-1}(z_i) phi_{k2-1}(z_o).
double big_h(CoreParams p, double z_i, double z_o);

// Psi itself (the max of the two branches above).
double psi_objective(CoreParams p, double z_i, double z_o);

// z_o with psi_{k2}(z_o) == psi_{k1}(z_i); throws when psi_{k1}(z_i)
// <= k2 (no root).
double constraint_zo(CoreParams p, double z_i);

// Requires max(k1,k2) >= 2; the remaining pairs have no nontrivial
// threshold. Negative k is treated as 0.
ThresholdResult compute_cstar(CoreParams p);

FixedPointOutcome fixed_point(double c, CoreParams p);

// Expected core size for a digraph with n vertices and round(c*n) arcs.
CorePrediction predict_core(double c, CoreParams p, double n);

// Upper bound on the subcritical core survival probability exponent
// base: min( (e^{k+1} c^k / k^k)^{1/(k-1)}, k/(c e) ). Requires k >= 2.
double alpha_bound(int k, double c);

enum class AsymptoticVariant { Diagonal, ZeroK };

// Large-k expansions: Diagonal approximates c*(k,k), ZeroK approximates
// c*(0,k). Returns nullopt when the expansion's log argument is < 1
// (ZeroK for k <= 6). Requires k >= 2.
std::optional<double> asymptotic_cstar(int k, AsymptoticVariant variant);

}
