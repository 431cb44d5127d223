#include "dicore/digraph.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dicore/log.hpp"

namespace dicore {

Digraph::Digraph(uint32_t n_, std::vector<std::pair<uint32_t, uint32_t>> arcs_)
    : n(n_), arcs(std::move(arcs_)) {
  in_deg.assign(n, 0);
  out_deg.assign(n, 0);
  for (auto [t, h] : arcs) {
    if (t >= n || h >= n) throw std::domain_error("arc endpoint out of range");
    out_deg[t]++;
    in_deg[h]++;
  }
  out_adj.assign(n, {});
  in_adj.assign(n, {});
  for (uint32_t u = 0; u < n; ++u) {
    out_adj[u].reserve(out_deg[u]);
    in_adj[u].reserve(in_deg[u]);
  }
  for (auto [t, h] : arcs) {
    out_adj[t].push_back(h);
    in_adj[h].push_back(t);
  }
}

Digraph sample_digraph(uint32_t n, uint64_t m, uint64_t seed) {
  const uint64_t total = n < 2 ? 0 : static_cast<uint64_t>(n) * (n - 1);
  if (m > total) {
    throw std::domain_error("sample_digraph: m exceeds n(n-1)");
  }
  SplitMix64 rng(seed);
  std::vector<std::pair<uint32_t, uint32_t>> arcs;
  arcs.reserve(m);
  if (m <= total / 2) {
    // Rejection sampling of distinct ordered pairs.
    std::unordered_set<uint64_t> used;
    used.reserve(m * 2);
    while (arcs.size() < m) {
      uint32_t t = static_cast<uint32_t>(rng.below(n));
      uint32_t h = static_cast<uint32_t>(rng.below(n));
      if (t == h) continue;
      uint64_t key = static_cast<uint64_t>(t) * n + h;
      if (used.insert(key).second) arcs.push_back({t, h});
    }
  } else {
    // Dense case: sample the complement instead, then keep the rest.
    uint64_t mc = total - m;
    std::unordered_set<uint64_t> comp;
    comp.reserve(mc * 2);
    while (comp.size() < mc) {
      uint32_t t = static_cast<uint32_t>(rng.below(n));
      uint32_t h = static_cast<uint32_t>(rng.below(n));
      if (t == h) continue;
      comp.insert(static_cast<uint64_t>(t) * n + h);
    }
    for (uint32_t t = 0; t < n; ++t) {
      for (uint32_t h = 0; h < n; ++h) {
        if (t == h) continue;
        if (!comp.count(static_cast<uint64_t>(t) * n + h)) {
          arcs.push_back({t, h});
        }
      }
    }
  }
  return Digraph(n, std::move(arcs));
}

MultiDigraphSeq sample_sequence_model(uint32_t n, uint64_t m, uint64_t seed) {
  if (n == 0 && m > 0) {
    throw std::domain_error("sample_sequence_model: no vertices");
  }
  SplitMix64 rng(seed);
  MultiDigraphSeq s;
  s.n = n;
  s.x.resize(2 * m);
  for (auto& lab : s.x) lab = static_cast<uint32_t>(rng.below(n));
  return s;
}

bool is_simple(const MultiDigraphSeq& g) {
  std::unordered_set<uint64_t> seen;
  seen.reserve(g.m() * 2);
  for (uint64_t r = 0; r + 1 < g.x.size(); r += 2) {
    uint32_t t = g.x[r], h = g.x[r + 1];
    if (t == h) return false;
    if (!seen.insert(static_cast<uint64_t>(t) * g.n + h).second) return false;
  }
  return true;
}

namespace {

DetailedState classify(CoreParams p, const std::vector<uint32_t>& in_deg,
                       const std::vector<uint32_t>& out_deg, double mu) {
  DetailedState s = DetailedState::zeros(p);
  for (size_t u = 0; u < in_deg.size(); ++u) {
    int a = static_cast<int>(in_deg[u]);
    int b = static_cast<int>(out_deg[u]);
    bool hi = a >= p.k1, ho = b >= p.k2;
    if (hi && ho) {
      s.v += 1;
    } else if (hi) {
      s.v_dot_b[b] += 1;
    } else if (ho) {
      s.v_a_dot[a] += 1;
    } else {
      s.ab(a, b) += 1;
    }
  }
  s.mu = mu;
  return s;
}

}  // namespace

DetailedState state_of(const Digraph& g, CoreParams p) {
  return classify(p, g.in_deg, g.out_deg, static_cast<double>(g.m()));
}

DetailedState state_of(const MultiDigraphSeq& g, CoreParams p) {
  std::vector<uint32_t> in_deg(g.n, 0), out_deg(g.n, 0);
  for (uint64_t r = 0; r + 1 < g.x.size(); r += 2) {
    out_deg[g.x[r]]++;
    in_deg[g.x[r + 1]]++;
  }
  return classify(p, in_deg, out_deg, static_cast<double>(g.m()));
}

PeelResult peel_core(const Digraph& g, CoreParams p, WorklistOrder order) {
  if (std::max(p.k1, p.k2) < 1) {
    throw std::domain_error("peel_core: needs max(k1,k2) >= 1");
  }
  std::vector<uint32_t> in_deg = g.in_deg, out_deg = g.out_deg;
  std::vector<uint8_t> removed(g.n, 0), queued(g.n, 0);
  std::deque<uint32_t> work;
  auto light = [&](uint32_t u) {
    return in_deg[u] < static_cast<uint32_t>(p.k1) ||
           out_deg[u] < static_cast<uint32_t>(p.k2);
  };
  for (uint32_t u = 0; u < g.n; ++u) {
    if (light(u)) {
      work.push_back(u);
      queued[u] = 1;
    }
  }
  PeelResult res;
  res.removed.reserve(g.n);
  while (!work.empty()) {
    uint32_t u;
    if (order == WorklistOrder::Fifo) {
      u = work.front();
      work.pop_front();
    } else {
      u = work.back();
      work.pop_back();
    }
    removed[u] = 1;
    res.removed.push_back(u);
    for (uint32_t w : g.out_adj[u]) {
      if (removed[w]) continue;
      in_deg[w]--;
      if (!queued[w] && light(w)) {
        work.push_back(w);
        queued[w] = 1;
      }
    }
    for (uint32_t w : g.in_adj[u]) {
      if (removed[w]) continue;
      out_deg[w]--;
      if (!queued[w] && light(w)) {
        work.push_back(w);
        queued[w] = 1;
      }
    }
  }
  res.in_core.assign(g.n, 0);
  uint64_t count = 0;
  for (uint32_t u = 0; u < g.n; ++u) {
    if (!removed[u]) {
      res.in_core[u] = 1;
      ++count;
    }
  }
  res.core_vertices = count;
  std::vector<std::pair<uint32_t, uint32_t>> core_arcs;
  for (auto [t, h] : g.arcs) {
    if (res.in_core[t] && res.in_core[h]) core_arcs.push_back({t, h});
  }
  res.core = Digraph(g.n, std::move(core_arcs));
  return res;
}

std::vector<uint32_t> brute_force_core(const Digraph& g, CoreParams p) {
  if (g.n > 16) {
    throw std::invalid_argument("brute_force_core: refusing n > 16");
  }
  const uint32_t n = g.n;
  std::vector<uint8_t> member(n, 0);
  std::vector<int> din(n), dout(n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::fill(din.begin(), din.end(), 0);
    std::fill(dout.begin(), dout.end(), 0);
    for (auto [t, h] : g.arcs) {
      if ((mask >> t & 1u) && (mask >> h & 1u)) {
        dout[t]++;
        din[h]++;
      }
    }
    bool ok = true;
    for (uint32_t u = 0; u < n && ok; ++u) {
      if (!(mask >> u & 1u)) continue;
      ok = din[u] >= p.k1 && dout[u] >= p.k2;
    }
    if (ok) {
      for (uint32_t u = 0; u < n; ++u) {
        if (mask >> u & 1u) member[u] = 1;
      }
    }
  }
  std::vector<uint32_t> out;
  for (uint32_t u = 0; u < n; ++u) {
    if (member[u]) out.push_back(u);
  }
  return out;
}

DeletionProcess::DeletionProcess(const Digraph& g, CoreParams p)
    : g_(&g), p_(p) {
  if (std::max(p.k1, p.k2) < 1) {
    throw std::domain_error("DeletionProcess: needs max(k1,k2) >= 1");
  }
  in_deg_ = g.in_deg;
  out_deg_ = g.out_deg;
  stripped_.assign(g.n, 0);
  s_ = state_of(g, p);
  pos_.assign(g.n, UINT32_MAX);
  for (uint32_t u = 0; u < g.n; ++u) {
    if (light(in_deg_[u], out_deg_[u]) && in_deg_[u] + out_deg_[u] > 0) {
      pos_[u] = static_cast<uint32_t>(pool_.size());
      pool_.push_back(u);
    }
  }
}

void DeletionProcess::tally(uint32_t a, uint32_t b, double w) {
  bool hi = a >= static_cast<uint32_t>(p_.k1);
  bool ho = b >= static_cast<uint32_t>(p_.k2);
  if (hi && ho) {
    s_.v += w;
  } else if (hi) {
    s_.v_dot_b[b] += w;
  } else if (ho) {
    s_.v_a_dot[a] += w;
  } else {
    s_.ab(static_cast<int>(a), static_cast<int>(b)) += w;
  }
}

void DeletionProcess::pool_sync(uint32_t u) {
  bool want = !stripped_[u] && in_deg_[u] + out_deg_[u] > 0 &&
              light(in_deg_[u], out_deg_[u]);
  bool have = pos_[u] != UINT32_MAX;
  if (want == have) return;
  if (want) {
    pos_[u] = static_cast<uint32_t>(pool_.size());
    pool_.push_back(u);
  } else {
    pool_remove(u);
  }
}

void DeletionProcess::pool_remove(uint32_t u) {
  uint32_t idx = pos_[u];
  uint32_t last = pool_.back();
  pool_[idx] = last;
  pos_[last] = idx;
  pool_.pop_back();
  pos_[u] = UINT32_MAX;
}

uint32_t DeletionProcess::step(SplitMix64& rng) {
  uint32_t u = pool_[rng.below(pool_.size())];
  uint32_t a = in_deg_[u], b = out_deg_[u];
  tally(a, b, -1.0);
  tally(0, 0, +1.0);
  s_.mu -= static_cast<double>(a + b);
  in_deg_[u] = 0;
  out_deg_[u] = 0;
  stripped_[u] = 1;
  pool_remove(u);
  for (uint32_t w : g_->out_adj[u]) {
    if (stripped_[w]) continue;
    tally(in_deg_[w], out_deg_[w], -1.0);
    in_deg_[w]--;
    tally(in_deg_[w], out_deg_[w], +1.0);
    pool_sync(w);
  }
  for (uint32_t w : g_->in_adj[u]) {
    if (stripped_[w]) continue;
    tally(in_deg_[w], out_deg_[w], -1.0);
    out_deg_[w]--;
    tally(in_deg_[w], out_deg_[w], +1.0);
    pool_sync(w);
  }
  ++steps_;
  return u;
}

std::array<double, 6> DeletionProcess::sample_step_delta(
    SplitMix64& rng) const {
  uint32_t u = pool_[rng.below(pool_.size())];
  // Contribution of one vertex of degree (a,b) to
  // (v_i, v_o, mu_i, mu_o, v, mu-is-handled-separately).
  auto contrib = [&](uint32_t a, uint32_t b, double sgn,
                     std::array<double, 6>& d) {
    bool hi = a >= static_cast<uint32_t>(p_.k1);
    bool ho = b >= static_cast<uint32_t>(p_.k2);
    if (hi) d[0] += sgn;
    if (ho) d[1] += sgn;
    if (!hi) d[2] += sgn * static_cast<double>(a);
    if (!ho) d[3] += sgn * static_cast<double>(b);
    if (hi && ho) d[4] += sgn;
  };
  std::array<double, 6> d{};
  uint32_t a = in_deg_[u], b = out_deg_[u];
  contrib(a, b, -1.0, d);
  contrib(0, 0, +1.0, d);
  d[5] = -static_cast<double>(a + b);
  // A neighbor joined by arcs in both directions loses one in- and one
  // out-degree at once; merge per-vertex before differencing.
  std::vector<std::pair<uint32_t, std::pair<uint32_t, uint32_t>>> hits;
  hits.reserve(g_->out_adj[u].size() + g_->in_adj[u].size());
  for (uint32_t w : g_->out_adj[u]) {
    if (!stripped_[w]) hits.push_back({w, {1, 0}});
  }
  for (uint32_t w : g_->in_adj[u]) {
    if (!stripped_[w]) hits.push_back({w, {0, 1}});
  }
  std::sort(hits.begin(), hits.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (size_t i = 0; i < hits.size();) {
    uint32_t w = hits[i].first;
    uint32_t di = 0, dj = 0;
    while (i < hits.size() && hits[i].first == w) {
      di += hits[i].second.first;
      dj += hits[i].second.second;
      ++i;
    }
    contrib(in_deg_[w], out_deg_[w], -1.0, d);
    contrib(in_deg_[w] - di, out_deg_[w] - dj, +1.0, d);
  }
  return d;
}

DetailedState DeletionProcess::recompute_state() const {
  double mu = 0;
  for (uint32_t u = 0; u < g_->n; ++u) mu += in_deg_[u];
  return classify(p_, in_deg_, out_deg_, mu);
}

std::vector<uint8_t> DeletionProcess::core_membership() const {
  std::vector<uint8_t> out(g_->n, 0);
  for (uint32_t u = 0; u < g_->n; ++u) {
    out[u] = in_deg_[u] >= static_cast<uint32_t>(p_.k1) &&
             out_deg_[u] >= static_cast<uint32_t>(p_.k2);
  }
  return out;
}

namespace {

bool states_match(const DetailedState& a, const DetailedState& b) {
  return a.v_ab == b.v_ab && a.v_a_dot == b.v_a_dot &&
         a.v_dot_b == b.v_dot_b && a.v == b.v && a.mu == b.mu;
}

}  // namespace

DeletionOutcome run_random_deletion(const Digraph& g, CoreParams p,
                                    uint64_t seed, bool record_trajectory,
                                    uint64_t verify_every) {
  DeletionProcess proc(g, p);
  SplitMix64 rng(seed);
  DeletionOutcome out;
  out.trajectory.push_back(proc.state());
  while (!proc.done()) {
    proc.step(rng);
    if (record_trajectory) out.trajectory.push_back(proc.state());
    if (verify_every > 0 && proc.steps() % verify_every == 0) {
      if (!states_match(proc.state(), proc.recompute_state())) {
        throw std::logic_error("deletion bookkeeping diverged from recount");
      }
    }
  }
  if (verify_every > 0 &&
      !states_match(proc.state(), proc.recompute_state())) {
    throw std::logic_error("deletion bookkeeping diverged at termination");
  }
  if (!record_trajectory) out.trajectory.push_back(proc.state());
  out.in_core = proc.core_membership();
  out.steps = proc.steps();
  return out;
}

Digraph read_edge_list(std::istream& in) {
  std::string line;
  uint64_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("edge list parse error at line " +
                             std::to_string(lineno) + ": " + what);
  };
  uint64_t n = 0, m = 0;
  // Header.
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string rest;
    if (!(ss >> n >> m) || (ss >> rest)) {
      fail("expected header 'n m'");
    }
    break;
  }
  if (lineno == 0) fail("empty input");
  std::vector<std::pair<uint32_t, uint32_t>> arcs;
  arcs.reserve(m);
  while (arcs.size() < m) {
    if (!std::getline(in, line)) {
      ++lineno;
      fail("expected " + std::to_string(m) + " arcs, got " +
           std::to_string(arcs.size()));
    }
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    uint64_t t, h;
    std::string rest;
    if (!(ss >> t >> h) || (ss >> rest)) {
      fail("expected 'tail head'");
    }
    if (t >= n || h >= n) {
      fail("vertex id out of range");
    }
    arcs.push_back(
        {static_cast<uint32_t>(t), static_cast<uint32_t>(h)});
  }
  return Digraph(static_cast<uint32_t>(n), std::move(arcs));
}

void write_edge_list(std::ostream& out, const Digraph& g) {
  out << g.n << " " << g.m() << "\n";
  for (auto [t, h] : g.arcs) {
    out << t << " " << h << "\n";
  }
}

}
