#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dicore/detailed_state.hpp"
#include "dicore/rng.hpp"
#include "dicore/threshold.hpp"

namespace dicore {

// Simple digraph: no loops, no duplicate arcs; antiparallel pairs are
// allowed. Adjacency and degrees are built once from the arc list.
struct Digraph {
  uint32_t n = 0;
  std::vector<std::pair<uint32_t, uint32_t>> arcs;  // (tail, head)
  std::vector<uint32_t> in_deg, out_deg;
  std::vector<std::vector<uint32_t>> out_adj, in_adj;

  Digraph() = default;
  Digraph(uint32_t n_, std::vector<std::pair<uint32_t, uint32_t>> arcs_);

  uint64_t m() const { return arcs.size(); }
};

// Multidigraph given by 2m iid labels, read as m ordered pairs; loops
// and repeats allowed. The surrogate model behind the sequence-based
// analysis.
struct MultiDigraphSeq {
  uint32_t n = 0;
  std::vector<uint32_t> x;  // 2m labels, pair r = (x[2r], x[2r+1])

  uint64_t m() const { return x.size() / 2; }
};

// Uniform simple digraph with exactly m arcs. Throws std::domain_error
// when m > n(n-1). Rejection sampling; switches to sampling the
// complement when m exceeds half the possible arcs.
Digraph sample_digraph(uint32_t n, uint64_t m, uint64_t seed);

MultiDigraphSeq sample_sequence_model(uint32_t n, uint64_t m, uint64_t seed);

// No loops and no duplicate ordered pairs.
bool is_simple(const MultiDigraphSeq& g);

DetailedState state_of(const Digraph& g, CoreParams p);
DetailedState state_of(const MultiDigraphSeq& g, CoreParams p);

enum class WorklistOrder { Fifo, Lifo };

struct PeelResult {
  Digraph core;                    // induced on the surviving vertices
  std::vector<uint32_t> removed;   // removal order
  std::vector<uint8_t> in_core;    // size n
  uint64_t core_vertices = 0;
};

// Worklist peeling to the (k1,k2)-core: repeatedly delete any vertex
// with in-degree < k1 or out-degree < k2. O(n + m); the resulting set
// does not depend on the worklist order. Requires max(k1,k2) >= 1.
PeelResult peel_core(const Digraph& g, CoreParams p,
                     WorklistOrder order = WorklistOrder::Fifo);

// Union of all sets whose induced sub-digraph satisfies the degree
// bounds. Exponential; refuses n > 16.
std::vector<uint32_t> brute_force_core(const Digraph& g, CoreParams p);

// The random deletion chain: while any non-isolated light vertex
// remains, pick one uniformly and delete all its incident arcs (the
// vertex itself stays, isolated). Exposed as a class so callers can
// pause mid-run, probe expected one-step drifts, or audit bookkeeping.
class DeletionProcess {
 public:
  DeletionProcess(const Digraph& g, CoreParams p);

  const DetailedState& state() const { return s_; }
  uint64_t pool_size() const { return pool_.size(); }
  bool done() const { return pool_.empty(); }
  uint64_t steps() const { return steps_; }

  // One deletion step; returns the vertex chosen. Requires !done().
  uint32_t step(SplitMix64& rng);

  // Draws a uniform light vertex and returns the state change its
  // deletion WOULD cause, without mutating anything:
  // (d v_i, d v_o, d mu_i, d mu_o, d v, d mu).
  std::array<double, 6> sample_step_delta(SplitMix64& rng) const;

  // Classification rebuilt from the maintained degree arrays; equals
  // state() exactly at every step (counts are integers).
  DetailedState recompute_state() const;

  // in-degree >= k1 and out-degree >= k2, evaluated on what is left.
  std::vector<uint8_t> core_membership() const;

  uint32_t in_degree(uint32_t u) const { return in_deg_[u]; }
  uint32_t out_degree(uint32_t u) const { return out_deg_[u]; }

 private:
  const Digraph* g_;
  CoreParams p_;
  std::vector<uint32_t> in_deg_, out_deg_;
  std::vector<uint8_t> stripped_;
  std::vector<uint32_t> pool_, pos_;
  DetailedState s_;
  uint64_t steps_ = 0;

  bool light(uint32_t a, uint32_t b) const {
    return a < static_cast<uint32_t>(p_.k1) ||
           b < static_cast<uint32_t>(p_.k2);
  }
  void tally(uint32_t a, uint32_t b, double w);
  void pool_sync(uint32_t u);
  void pool_remove(uint32_t u);
};

struct DeletionOutcome {
  std::vector<DetailedState> trajectory;  // includes the initial state
  std::vector<uint8_t> in_core;
  uint64_t steps = 0;
};

// Runs the chain to absorption. verify_every > 0 cross-checks the
// incremental state against a from-scratch recount every that many
// steps (and at the end).
DeletionOutcome run_random_deletion(const Digraph& g, CoreParams p,
                                    uint64_t seed,
                                    bool record_trajectory = true,
                                    uint64_t verify_every = 0);

// Text edge list: header "n m", then one "tail head" per line, 0-based.
// Throws std::runtime_error naming the offending line on parse errors.
Digraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Digraph& g);

}
