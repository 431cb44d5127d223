#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dicore/threshold.hpp"

namespace dicore {

struct WilsonInterval {
  double low = 0;
  double high = 1;
};

// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson95(uint64_t count, uint64_t trials);

struct ExperimentConfig {
  uint32_t n = 0;
  uint64_t m = 0;  // arc count; when built from c, m = round(c*n)
  CoreParams params;
  uint64_t trials = 0;
  uint64_t seed = 0;
  int jobs = 1;
  std::string output_format = "json";
  std::string output_path;

  double c() const { return n ? static_cast<double>(m) / n : 0.0; }
};

struct TrialRecord {
  uint32_t core_vertices = 0;
  uint64_t core_arcs = 0;
  uint8_t nonempty = 0;
};

struct McResult {
  uint64_t trials = 0;
  uint64_t nonempty_count = 0;
  double nonempty_fraction = 0;
  WilsonInterval wilson_ci95;
  double mean_core_vertices = 0;  // over all trials, empty cores count 0
  double mean_core_arcs = 0;
};

// Samples `trials` digraphs D(n,m) and peels each to its core. Trial t
// uses the RNG stream mix64(seed, t), and records are folded in trial
// order, so the result is identical for any jobs value.
McResult run_mc(const ExperimentConfig& cfg,
                std::vector<TrialRecord>* per_trial = nullptr);

}
