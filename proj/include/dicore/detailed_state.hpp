#pragma once

#include <cassert>
#include <vector>

#include "dicore/threshold.hpp"

namespace dicore {

// Aggregated degree bookkeeping for the deletion process. Vertices are
// classified by (in-degree clamped at k1, out-degree clamped at k2):
//
//   v_ab[a*k2+b]  in == a < k1 and out == b < k2   (light both ways)
//   v_a_dot[a]    in == a < k1 and out >= k2
//   v_dot_b[b]    in >= k1 and out == b < k2
//   v             in >= k1 and out >= k2           (heavy)
//   mu            total number of arcs
//
// Entries are counts for simulated graphs and fractions for the
// continuum limit; all derived quantities are scale-free or scale
// linearly, so both uses share this type.
struct DetailedState {
  int k1 = 0;
  int k2 = 0;
  std::vector<double> v_ab;     // k1*k2 entries, row-major
  std::vector<double> v_a_dot;  // k1 entries
  std::vector<double> v_dot_b;  // k2 entries
  double v = 0;
  double mu = 0;

  static DetailedState zeros(CoreParams p) {
    DetailedState s;
    s.k1 = p.k1;
    s.k2 = p.k2;
    s.v_ab.assign(static_cast<size_t>(p.k1) * p.k2, 0.0);
    s.v_a_dot.assign(p.k1, 0.0);
    s.v_dot_b.assign(p.k2, 0.0);
    return s;
  }

  double& ab(int a, int b) { return v_ab[static_cast<size_t>(a) * k2 + b]; }
  double ab(int a, int b) const {
    return v_ab[static_cast<size_t>(a) * k2 + b];
  }

  // Row/column sums of the light-both block.
  double row_a(int a) const {
    double s = 0;
    for (int b = 0; b < k2; ++b) s += ab(a, b);
    return s;
  }
  double col_b(int b) const {
    double s = 0;
    for (int a = 0; a < k1; ++a) s += ab(a, b);
    return s;
  }

  // v_a: all vertices with in-degree exactly a < k1; v_b likewise.
  double v_a(int a) const { return row_a(a) + v_a_dot[a]; }
  double v_b(int b) const { return col_b(b) + v_dot_b[b]; }

  // In-heavy and out-heavy totals.
  double v_i() const {
    double s = v;
    for (int b = 0; b < k2; ++b) s += v_dot_b[b];
    return s;
  }
  double v_o() const {
    double s = v;
    for (int a = 0; a < k1; ++a) s += v_a_dot[a];
    return s;
  }

  // Arc mass held by light-side degrees.
  double mu_i() const {
    double s = 0;
    for (int a = 0; a < k1; ++a) s += a * v_a(a);
    return s;
  }
  double mu_o() const {
    double s = 0;
    for (int b = 0; b < k2; ++b) s += b * v_b(b);
    return s;
  }

  // Light vertices excluding the (0,0) cell. For min(k1,k2) >= 1 this is
  // exactly the non-isolated light count; for k1 == 0 or k2 == 0 the
  // isolated vertices sit in v_a_dot[0] / v_dot_b[0] and are included
  // here (the simulator tracks its deletion pool separately).
  double light() const {
    double s = 0;
    for (size_t i = 0; i < v_ab.size(); ++i) s += v_ab[i];
    if (k1 > 0 && k2 > 0) s -= ab(0, 0);
    for (int a = 0; a < k1; ++a) s += v_a_dot[a];
    for (int b = 0; b < k2; ++b) s += v_dot_b[b];
    return s;
  }

  double total() const {
    double s = v;
    for (size_t i = 0; i < v_ab.size(); ++i) s += v_ab[i];
    for (int a = 0; a < k1; ++a) s += v_a_dot[a];
    for (int b = 0; b < k2; ++b) s += v_dot_b[b];
    return s;
  }
};

}
