#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicore/digraph.hpp"
#include "dicore/log.hpp"
#include "dicore/mc.hpp"
#include "dicore/ode.hpp"
#include "dicore/rng.hpp"
#include "dicore/threshold.hpp"
#include "dicore/version.hpp"

using dicore::CoreParams;
using ojson = nlohmann::ordered_json;

namespace {

struct Args {
  int k1 = 0;
  int k2 = 0;
  uint32_t n = 0;
  uint64_t m = 0;
  double c = 0;
  uint64_t trials = 1000;
  uint64_t seed = 0;
  int jobs = 1;
  std::string format = "json";
  std::string out;
  std::string input;
  std::string model = "uniform";
};

const char* verdict_str(dicore::FixedPointVerdict v) {
  return v == dicore::FixedPointVerdict::Supercritical ? "Supercritical"
                                                       : "Subcritical";
}

const char* verdict_str(dicore::OdeVerdict v) {
  switch (v) {
    case dicore::OdeVerdict::TerminatedSupercritical:
      return "TerminatedSupercritical";
    case dicore::OdeVerdict::CollapsedSubcritical:
      return "CollapsedSubcritical";
    default:
      return "StepLimit";
  }
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << bytes;
  f.flush();
  if (!f.good()) throw std::runtime_error("failed writing: " + path);
}

uint64_t arcs_from_c(double c, uint32_t n) {
  if (!(c >= 0)) throw std::domain_error("c must be nonnegative");
  return static_cast<uint64_t>(std::llround(c * n));
}

ojson cmd_threshold(const Args& a) {
  dicore::ThresholdResult r = dicore::compute_cstar({a.k1, a.k2});
  ojson doc;
  doc["config"] = {{"k1", a.k1}, {"k2", a.k2}};
  doc["results"] = {{"c_star", r.c_star},
                    {"z_i_star", r.z_i_star},
                    {"z_o_star", r.z_o_star},
                    {"beta_at_threshold", r.beta_at_threshold}};
  return doc;
}

ojson cmd_fixedpoint(const Args& a) {
  dicore::FixedPointOutcome r = dicore::fixed_point(a.c, {a.k1, a.k2});
  ojson doc;
  doc["config"] = {{"c", a.c}, {"k1", a.k1}, {"k2", a.k2}};
  doc["results"] = {{"verdict", verdict_str(r.verdict)},
                    {"z_i", r.z_i},
                    {"z_o", r.z_o},
                    {"beta", r.beta},
                    {"core_edge_per_vertex", r.core_edge_per_vertex},
                    {"iterations", r.iterations}};
  return doc;
}

ojson cmd_predict(const Args& a) {
  dicore::CorePrediction r =
      dicore::predict_core(a.c, {a.k1, a.k2}, static_cast<double>(a.n));
  ojson doc;
  doc["config"] = {{"c", a.c}, {"k1", a.k1}, {"k2", a.k2}, {"n", a.n}};
  doc["results"] = {
      {"nonempty", r.nonempty}, {"vertices", r.vertices}, {"arcs", r.arcs}};
  return doc;
}

ojson cmd_mc(const Args& a, bool m_given, bool c_given) {
  dicore::ExperimentConfig cfg;
  cfg.n = a.n;
  if (m_given == c_given) {
    throw std::domain_error("mc: give exactly one of --m and --c");
  }
  cfg.m = m_given ? a.m : arcs_from_c(a.c, a.n);
  cfg.params = {a.k1, a.k2};
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.output_format = a.format;
  cfg.output_path = a.out;
  dicore::log_debug("mc: " + std::to_string(cfg.trials) + " trials at m=" +
                    std::to_string(cfg.m));
  std::vector<dicore::TrialRecord> records;
  dicore::McResult res =
      dicore::run_mc(cfg, a.format == "csv" ? &records : nullptr);
  ojson doc;
  doc["config"] = {{"n", cfg.n},     {"m", cfg.m},
                   {"c", cfg.c()},   {"k1", a.k1},
                   {"k2", a.k2},     {"trials", cfg.trials},
                   {"seed", cfg.seed}};
  doc["results"] = {{"trials", res.trials},
                    {"nonempty_count", res.nonempty_count},
                    {"nonempty_fraction", res.nonempty_fraction},
                    {"wilson_ci95",
                     {{"low", res.wilson_ci95.low},
                      {"high", res.wilson_ci95.high}}},
                    {"mean_core_vertices", res.mean_core_vertices},
                    {"mean_core_arcs", res.mean_core_arcs}};
  if (!a.out.empty() && a.format == "csv") {
    std::string csv = "trial,core_vertices,core_arcs,nonempty\n";
    for (size_t t = 0; t < records.size(); ++t) {
      csv += std::to_string(t) + "," +
             std::to_string(records[t].core_vertices) + "," +
             std::to_string(records[t].core_arcs) + "," +
             std::to_string(static_cast<int>(records[t].nonempty)) + "\n";
    }
    write_file(a.out, csv);
  }
  return doc;
}

ojson cmd_peel(const Args& a) {
  std::ifstream f(a.input, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open input file: " + a.input);
  dicore::Digraph g = dicore::read_edge_list(f);
  dicore::PeelResult r = dicore::peel_core(g, {a.k1, a.k2});
  if (!a.out.empty()) {
    std::ostringstream ss;
    dicore::write_edge_list(ss, r.core);
    write_file(a.out, ss.str());
  }
  ojson doc;
  doc["config"] = {{"input", a.input}, {"k1", a.k1}, {"k2", a.k2}};
  doc["results"] = {{"n", g.n},
                    {"m", g.m()},
                    {"core_vertices", r.core_vertices},
                    {"core_arcs", r.core.m()},
                    {"removed", r.removed.size()}};
  return doc;
}

ojson cmd_ode(const Args& a) {
  dicore::OdeOutcome r = dicore::integrate(a.c, {a.k1, a.k2});
  if (!a.out.empty() && a.format == "csv") {
    std::ostringstream ss;
    dicore::write_trajectory_csv(ss, r.trajectory);
    write_file(a.out, ss.str());
  }
  ojson doc;
  doc["config"] = {{"c", a.c}, {"k1", a.k1}, {"k2", a.k2}};
  doc["results"] = {{"verdict", verdict_str(r.verdict)},
                    {"terminal_time", r.terminal_time},
                    {"z_i", r.terminal_state.z_i},
                    {"z_o", r.terminal_state.z_o},
                    {"v", r.terminal_state.s.v},
                    {"mu", r.terminal_state.s.mu},
                    {"phi1_drift", r.phi1_drift},
                    {"phi2_drift", r.phi2_drift},
                    {"steps", r.steps},
                    {"samples", r.trajectory.size()}};
  return doc;
}

// When --out is absent the edge list itself goes to stdout and the JSON
// summary is suppressed (flagged through print_doc).
ojson cmd_sample(const Args& a, bool& print_doc) {
  std::ostringstream ss;
  bool simple = true;
  if (a.model == "sequence") {
    dicore::MultiDigraphSeq s = dicore::sample_sequence_model(a.n, a.m, a.seed);
    ss << s.n << " " << s.m() << "\n";
    for (uint64_t r = 0; r + 1 < s.x.size(); r += 2) {
      ss << s.x[r] << " " << s.x[r + 1] << "\n";
    }
    simple = dicore::is_simple(s);
  } else {
    dicore::Digraph g = dicore::sample_digraph(a.n, a.m, a.seed);
    dicore::write_edge_list(ss, g);
  }
  if (!a.out.empty()) {
    write_file(a.out, ss.str());
  } else {
    std::cout << ss.str();
    print_doc = false;
  }
  ojson doc;
  doc["config"] = {
      {"n", a.n}, {"m", a.m}, {"seed", a.seed}, {"model", a.model}};
  doc["results"] = {{"model", a.model}, {"simple", simple}};
  return doc;
}

ojson cmd_compare(const Args& a) {
  CoreParams p{a.k1, a.k2};
  uint64_t m = arcs_from_c(a.c, a.n);
  dicore::Digraph g =
      dicore::sample_digraph(a.n, m, dicore::mix64(a.seed, 0));
  dicore::DeletionOutcome sim =
      dicore::run_random_deletion(g, p, dicore::mix64(a.seed, 1));
  dicore::OdeOutcome ode = dicore::integrate(a.c, p);
  const double n = static_cast<double>(a.n);
  double gv = 0, gmu = 0, gmi = 0, gmo = 0, gvi = 0, gvo = 0;
  for (const auto& row : ode.trajectory) {
    auto s_idx = static_cast<uint64_t>(std::llround(row.t * n));
    s_idx = std::min<uint64_t>(s_idx, sim.trajectory.size() - 1);
    const dicore::DetailedState& ds = sim.trajectory[s_idx];
    gv = std::max(gv, std::fabs(ds.v / n - row.v));
    gmu = std::max(gmu, std::fabs(ds.mu / n - row.mu));
    gmi = std::max(gmi, std::fabs(ds.mu_i() / n - row.mu_i));
    gmo = std::max(gmo, std::fabs(ds.mu_o() / n - row.mu_o));
    gvi = std::max(gvi, std::fabs(ds.v_i() / n - row.v_i));
    gvo = std::max(gvo, std::fabs(ds.v_o() / n - row.v_o));
  }
  uint64_t in_core = 0;
  for (uint8_t b : sim.in_core) in_core += b;
  ojson doc;
  doc["config"] = {{"c", a.c}, {"n", a.n},       {"m", m},
                   {"k1", a.k1}, {"k2", a.k2},   {"seed", a.seed}};
  doc["results"] = {{"max_gap_v", gv},
                    {"max_gap_mu", gmu},
                    {"max_gap_mu_i", gmi},
                    {"max_gap_mu_o", gmo},
                    {"max_gap_v_i", gvi},
                    {"max_gap_v_o", gvo},
                    {"sim_core_fraction", static_cast<double>(in_core) / n},
                    {"sim_steps", sim.steps},
                    {"ode_verdict", verdict_str(ode.verdict)}};
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(k1,k2)-core thresholds, peeling, and deletion dynamics "
               "for random digraphs"};
  app.require_subcommand(1);
  Args a;

  auto add_kk = [&](CLI::App* cmd) {
    cmd->add_option("--k1", a.k1, "in-degree bound")->required();
    cmd->add_option("--k2", a.k2, "out-degree bound")->required();
  };
  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", a.out, "output file path");
  };

  CLI::App* thr = app.add_subcommand(
      "threshold", "critical arc density c*(k1,k2) and the minimizer");
  add_kk(thr);
  add_io(thr);

  CLI::App* fixp = app.add_subcommand(
      "fixedpoint", "limit of the tilt iteration at density c");
  fixp->add_option("--c", a.c, "arcs per vertex")->required();
  add_kk(fixp);
  add_io(fixp);

  CLI::App* pred = app.add_subcommand(
      "predict", "expected core size for n vertices at density c");
  pred->add_option("--c", a.c, "arcs per vertex")->required();
  add_kk(pred);
  pred->add_option("--n", a.n, "number of vertices")->required();
  add_io(pred);

  CLI::App* mc = app.add_subcommand(
      "mc", "Monte Carlo core statistics over sampled digraphs");
  mc->add_option("--n", a.n, "number of vertices")->required();
  CLI::Option* mc_m = mc->add_option("--m", a.m, "number of arcs");
  CLI::Option* mc_c = mc->add_option("--c", a.c, "arcs per vertex");
  add_kk(mc);
  mc->add_option("--trials", a.trials, "number of sampled digraphs");
  mc->add_option("--seed", a.seed, "base RNG seed");
  mc->add_option("--jobs", a.jobs, "worker threads");
  add_io(mc);

  CLI::App* peel = app.add_subcommand(
      "peel", "peel an edge-list file to its (k1,k2)-core");
  peel->add_option("input", a.input, "edge list file")->required();
  add_kk(peel);
  add_io(peel);

  CLI::App* ode = app.add_subcommand(
      "ode", "integrate the deletion dynamics from density c");
  ode->add_option("--c", a.c, "arcs per vertex")->required();
  add_kk(ode);
  add_io(ode);

  CLI::App* sample = app.add_subcommand(
      "sample", "sample a digraph and write it as an edge list");
  sample->add_option("--n", a.n, "number of vertices")->required();
  sample->add_option("--m", a.m, "number of arcs")->required();
  sample->add_option("--seed", a.seed, "RNG seed");
  sample->add_option("--model", a.model, "uniform simple or label sequence")
      ->check(CLI::IsMember({"uniform", "sequence"}));
  add_io(sample);

  CLI::App* cmp = app.add_subcommand(
      "compare", "one deletion run on D(n, round(cn)) against the ODE");
  cmp->add_option("--c", a.c, "arcs per vertex")->required();
  add_kk(cmp);
  cmp->add_option("--n", a.n, "number of vertices")->required();
  cmp->add_option("--seed", a.seed, "RNG seed");
  add_io(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  ojson doc;
  bool print_doc = true;
  try {
    if (thr->parsed()) {
      doc = cmd_threshold(a);
    } else if (fixp->parsed()) {
      doc = cmd_fixedpoint(a);
    } else if (pred->parsed()) {
      doc = cmd_predict(a);
    } else if (mc->parsed()) {
      doc = cmd_mc(a, mc_m->count() > 0, mc_c->count() > 0);
    } else if (peel->parsed()) {
      doc = cmd_peel(a);
    } else if (ode->parsed()) {
      doc = cmd_ode(a);
    } else if (sample->parsed()) {
      doc = cmd_sample(a, print_doc);
    } else if (cmp->parsed()) {
      doc = cmd_compare(a);
    }
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  doc["software_version"] = dicore::kVersion;

  // Reproducible byte-for-byte: the file copy never carries wall time.
  try {
    if (!a.out.empty() && a.format == "json" &&
        !(peel->parsed() || sample->parsed())) {
      write_file(a.out, doc.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  if (print_doc) {
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    doc["elapsed_seconds"] = elapsed;
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}
