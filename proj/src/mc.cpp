#include "dicore/mc.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "dicore/digraph.hpp"
#include "dicore/rng.hpp"

namespace dicore {

WilsonInterval wilson95(uint64_t count, uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.low = count == 0 ? 0.0 : center - half;
  w.high = count == trials ? 1.0 : center + half;
  return w;
}

McResult run_mc(const ExperimentConfig& cfg,
                std::vector<TrialRecord>* per_trial) {
  const uint64_t total =
      cfg.n < 2 ? 0 : static_cast<uint64_t>(cfg.n) * (cfg.n - 1);
  if (cfg.m > total) {
    throw std::domain_error("run_mc: m exceeds n(n-1)");
  }
  if (std::max(cfg.params.k1, cfg.params.k2) < 1) {
    throw std::domain_error("run_mc: needs max(k1,k2) >= 1");
  }
  std::vector<TrialRecord> records(cfg.trials);
  auto one_trial = [&](uint64_t t) {
    Digraph g = sample_digraph(cfg.n, cfg.m, mix64(cfg.seed, t));
    PeelResult pr = peel_core(g, cfg.params);
    TrialRecord rec;
    rec.core_vertices = static_cast<uint32_t>(pr.core_vertices);
    rec.core_arcs = pr.core.m();
    rec.nonempty = pr.core_vertices > 0;
    records[t] = rec;
  };
  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || cfg.trials < 2) {
    for (uint64_t t = 0; t < cfg.trials; ++t) one_trial(t);
  } else {
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
      for (;;) {
        uint64_t t = next.fetch_add(1);
        if (t >= cfg.trials) break;
        one_trial(t);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // Fold in trial order so the aggregate never depends on jobs.
  McResult res;
  res.trials = cfg.trials;
  double sum_v = 0, sum_a = 0;
  for (const auto& rec : records) {
    res.nonempty_count += rec.nonempty;
    sum_v += static_cast<double>(rec.core_vertices);
    sum_a += static_cast<double>(rec.core_arcs);
  }
  if (cfg.trials > 0) {
    const double n = static_cast<double>(cfg.trials);
    res.nonempty_fraction = static_cast<double>(res.nonempty_count) / n;
    res.mean_core_vertices = sum_v / n;
    res.mean_core_arcs = sum_a / n;
  }
  res.wilson_ci95 = wilson95(res.nonempty_count, res.trials);
  if (per_trial) *per_trial = std::move(records);
  return res;
}

}
