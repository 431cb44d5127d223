#include <doctest.h>

#include <cmath>
#include <vector>

#include "dicore/mc.hpp"

using namespace dicore;

namespace {

double abs_err(double got, double want) { return std::fabs(got - want); }

bool same_records(const std::vector<TrialRecord>& a,
                  const std::vector<TrialRecord>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].core_vertices != b[i].core_vertices) return false;
    if (a[i].core_arcs != b[i].core_arcs) return false;
    if (a[i].nonempty != b[i].nonempty) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("wilson95 frozen values") {
  WilsonInterval a = wilson95(27, 100);
  CHECK(abs_err(a.low, 0.19269584149576343) < 1e-12);
  CHECK(abs_err(a.high, 0.36432116767944998) < 1e-12);
  WilsonInterval b = wilson95(0, 50);
  CHECK(b.low == 0.0);
  CHECK(abs_err(b.high, 0.071347599133358714) < 1e-12);
  WilsonInterval c = wilson95(50, 50);
  CHECK(abs_err(c.low, 0.92865240086664129) < 1e-12);
  CHECK(c.high == 1.0);
  WilsonInterval d = wilson95(0, 0);
  CHECK(d.low == 0.0);
  CHECK(d.high == 1.0);
}

TEST_CASE("run_mc is independent of the job count") {
  ExperimentConfig cfg;
  cfg.n = 200;
  cfg.m = 640;
  cfg.params = {1, 2};
  cfg.trials = 400;
  cfg.seed = 12345;

  cfg.jobs = 1;
  std::vector<TrialRecord> rec1;
  McResult r1 = run_mc(cfg, &rec1);

  cfg.jobs = 3;
  std::vector<TrialRecord> rec3;
  McResult r3 = run_mc(cfg, &rec3);

  CHECK(same_records(rec1, rec3));
  CHECK(r1.nonempty_count == r3.nonempty_count);
  CHECK(r1.nonempty_fraction == r3.nonempty_fraction);
  CHECK(r1.mean_core_vertices == r3.mean_core_vertices);
  CHECK(r1.mean_core_arcs == r3.mean_core_arcs);
  CHECK(r1.wilson_ci95.low == r3.wilson_ci95.low);
  CHECK(r1.wilson_ci95.high == r3.wilson_ci95.high);

  CHECK(rec1.size() == cfg.trials);
  CHECK(r1.trials == cfg.trials);
  uint64_t cnt = 0;
  for (const auto& t : rec1) cnt += t.nonempty;
  CHECK(cnt == r1.nonempty_count);
  CHECK(r1.nonempty_fraction ==
        static_cast<double>(cnt) / static_cast<double>(cfg.trials));
}

TEST_CASE("run_mc aggregates are self-consistent") {
  ExperimentConfig cfg;
  cfg.n = 100;
  cfg.m = 300;
  cfg.params = {1, 2};
  cfg.trials = 2000;
  cfg.seed = 7;
  cfg.jobs = 2;
  std::vector<TrialRecord> rec;
  McResult r = run_mc(cfg, &rec);
  double sv = 0, sa = 0;
  for (const auto& t : rec) {
    sv += t.core_vertices;
    sa += static_cast<double>(t.core_arcs);
    if (t.nonempty) {
      CHECK(t.core_vertices > 0);
    } else {
      CHECK(t.core_vertices == 0);
      CHECK(t.core_arcs == 0);
    }
  }
  CHECK(abs_err(r.mean_core_vertices, sv / cfg.trials) < 1e-12);
  CHECK(abs_err(r.mean_core_arcs, sa / cfg.trials) < 1e-12);
  // Loose statistical sanity: this point sits near fraction 0.27.
  CHECK(r.nonempty_fraction > 0.15);
  CHECK(r.nonempty_fraction < 0.40);
  CHECK(r.wilson_ci95.low < r.nonempty_fraction);
  CHECK(r.wilson_ci95.high > r.nonempty_fraction);
}

TEST_CASE("config records the density") {
  ExperimentConfig cfg;
  cfg.n = 1000;
  cfg.m = 3300;
  CHECK(abs_err(cfg.c(), 3.3) < 1e-15);
}
