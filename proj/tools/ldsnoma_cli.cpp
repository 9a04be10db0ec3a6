// Command-line front end: spreading-design experiments over random UE drops,
// with CSV output suitable for external plotting.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ldsnoma/allocator.hpp"
#include "ldsnoma/experiments.hpp"
#include "ldsnoma/parallel.hpp"
#include "ldsnoma/textio.hpp"
#include "ldsnoma/units.hpp"

namespace {

using ldsnoma::ExperimentConfig;

// Streams CSV either to --out or to stdout, leaving the human-readable
// summary on stderr so piped output stays machine-readable.
void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << payload;
}

void run_allocate(const ExperimentConfig& cfg) {
  ldsnoma::validate_config(cfg);
  const ldsnoma::RandomStream rng(cfg.seed);
  const ldsnoma::Scenario scn =
      !cfg.scenario_path.empty()
          ? ldsnoma::load_scenario(cfg.scenario_path)
          : ldsnoma::make_drop(cfg.F, cfg.K.front(), cfg.d.front(),
                               rng.substream(0));
  const ldsnoma::Method method = cfg.methods.front();
  const ldsnoma::SpreadingMatrix v = [&] {
    switch (method) {
      case ldsnoma::Method::greedy: return ldsnoma::greedy_partition(scn);
      case ldsnoma::Method::regular: return ldsnoma::regular_spreading(scn);
      case ldsnoma::Method::random:
        return ldsnoma::random_spreading(scn, rng.substream(1));
      case ldsnoma::Method::dense: return ldsnoma::dense_spreading(scn);
    }
    throw std::logic_error("unreachable method value");
  }();

  std::ostringstream payload;
  ldsnoma::save_spreading(v, payload);
  emit(cfg.out, payload.str());

  const ldsnoma::OptimalityCertificate cert = ldsnoma::certificate(scn, v);
  const double det = ldsnoma::det_emi(
      scn, v, ldsnoma::FixedPointOptions{1e-12, cfg.fp_max_iter, 0.0});
  const double factor = cfg.bits ? ldsnoma::kNatsToBits : 1.0;
  std::cerr << ldsnoma::to_string(method) << " allocation: F="
            << scn.num_subchannels << " K=" << scn.num_ues() << "\n  det_emi "
            << ldsnoma::format_double(det * factor, 6)
            << (cfg.bits ? " bits" : " nats") << "\n  r* "
            << ldsnoma::format_double(cert.r_star, 6) << ", eta in ["
            << ldsnoma::format_double(cert.eta.minCoeff(), 6) << ", "
            << ldsnoma::format_double(cert.eta.maxCoeff(), 6)
            << "]\n  residuals: sub-channel "
            << ldsnoma::format_double(cert.max_subchannel_residual(), 3)
            << ", power "
            << ldsnoma::format_double(cert.max_power_residual(), 3) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Low-density-spreading NOMA uplink designs: deterministic-equivalent "
      "rates, greedy power-fragment allocation and Monte-Carlo validation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string scenario_path;
  std::string matrix_path;
  std::uint64_t seed = 0;
  int drops = 0;
  int trials = 0;
  int num_f = 0;
  int threads = 0;
  int fp_max_iter = 0;
  std::vector<int> num_k;
  std::vector<int> sparsity;
  std::vector<std::string> method_names;
  bool fast = false;

  app.add_option("--config", config_path,
                 "Key-value config file; command-line flags override it");
  app.add_option("--seed", seed, "Base seed for all derived streams");
  app.add_option("--drops", drops, "UE drops (epsilon: matrices per d)");
  app.add_option("--trials", trials, "Fading draws per Monte-Carlo estimate (0 disables MC)");
  app.add_option("-F,--subchannels", num_f, "Number of sub-channels");
  app.add_option("-K,--ues", num_k, "Number of UEs (list for sweep-k)")
      ->delimiter(',');
  app.add_option("-d,--sparsity", sparsity,
                 "Sub-channels per UE (list for sweep-d and epsilon)")
      ->delimiter(',');
  app.add_option("--methods", method_names,
                 "Subset of greedy,regular,random,dense")
      ->delimiter(',');
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--threads", threads, "Worker threads (default: all cores)");
  app.add_option("--fp-max-iter", fp_max_iter,
                 "Iteration budget for fixed-point solves");
  app.add_option("--scenario", scenario_path,
                 "Stored scenario file instead of random drops");
  app.add_option("--matrix", matrix_path,
                 "Stored spreading matrix to score (evaluate only)");
  auto* bits_flag = app.add_flag("--bits", "Report rates in bits (default)");
  auto* nats_flag = app.add_flag("--nats", "Report rates in nats");
  nats_flag->excludes(bits_flag);
  app.add_flag("--fast", fast,
               "CI preset: drops=100, trials=200 (explicit flags still win)");

  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "Score methods on random drops or a stored scenario");
  auto* cmd_allocate = app.add_subcommand(
      "allocate", "Emit one method's spreading matrix as triplet text");
  auto* cmd_sweep_k = app.add_subcommand(
      "sweep-k", "Rates versus number of UEs at fixed sparsity");
  auto* cmd_sweep_d = app.add_subcommand(
      "sweep-d", "Rates versus sparsity at fixed load");
  auto* cmd_epsilon = app.add_subcommand(
      "epsilon", "Residual-term statistics over random sparse designs");
  auto* cmd_visualize = app.add_subcommand(
      "visualize", "Greedy allocation triplets for heat-map plotting");
  for (CLI::App* sub : {cmd_evaluate, cmd_allocate, cmd_sweep_k, cmd_sweep_d,
                        cmd_epsilon, cmd_visualize})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    std::unique_ptr<ldsnoma::KeyValueDoc> doc;
    ExperimentConfig cfg;
    if (cmd_visualize->parsed()) {
      // Illustration-sized defaults; config and flags still override.
      cfg.F = 30;
      cfg.K = {90};
      cfg.d = {2};
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open " + config_path);
      doc = std::make_unique<ldsnoma::KeyValueDoc>(ldsnoma::KeyValueDoc::parse(in));
      const ExperimentConfig from_file = ldsnoma::config_from_doc(*doc);
      // Merge: file values override defaults field by field.
      ExperimentConfig merged = from_file;
      if (!doc->has("F") && cmd_visualize->parsed()) merged.F = cfg.F;
      if (!doc->has("K") && cmd_visualize->parsed()) merged.K = cfg.K;
      if (!doc->has("d") && cmd_visualize->parsed()) merged.d = cfg.d;
      cfg = merged;
    }

    if (cmd_evaluate->parsed()) cfg.experiment = "evaluate";
    if (cmd_allocate->parsed()) cfg.experiment = "allocate";
    if (cmd_sweep_k->parsed()) cfg.experiment = "sweep-k";
    if (cmd_sweep_d->parsed()) cfg.experiment = "sweep-d";
    if (cmd_epsilon->parsed()) cfg.experiment = "epsilon";
    if (cmd_visualize->parsed()) cfg.experiment = "visualize";

    if (fast) {
      cfg.drops = 100;
      cfg.fading_trials = 200;
    }
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--drops")) cfg.drops = drops;
    if (app.count("--trials")) cfg.fading_trials = trials;
    if (app.count("--subchannels")) cfg.F = num_f;
    if (app.count("--ues")) cfg.K = num_k;
    if (app.count("--sparsity")) cfg.d = sparsity;
    if (app.count("--methods")) {
      cfg.methods.clear();
      for (const std::string& name : method_names)
        cfg.methods.push_back(ldsnoma::method_from_string(name));
    }
    if (app.count("--out")) cfg.out = out_path;
    if (app.count("--threads")) cfg.threads = threads;
    if (app.count("--fp-max-iter")) cfg.fp_max_iter = fp_max_iter;
    if (app.count("--scenario")) cfg.scenario_path = scenario_path;
    if (app.count("--matrix")) cfg.matrix_path = matrix_path;
    if (bits_flag->count()) cfg.bits = true;
    if (nats_flag->count()) cfg.bits = false;

    if (cfg.threads > 0)
      ldsnoma::set_thread_count(static_cast<std::size_t>(cfg.threads));

    if (cfg.experiment == "allocate") {
      run_allocate(cfg);
      return 0;
    }
    if (cfg.experiment == "epsilon") {
      const std::vector<ldsnoma::EpsilonStats> stats = ldsnoma::run_epsilon(cfg);
      std::ostringstream payload;
      ldsnoma::write_epsilon_csv(payload, stats, cfg.bits);
      emit(cfg.out, payload.str());
      return 0;
    }
    if (cfg.experiment == "visualize") {
      const ldsnoma::AllocationTable table = ldsnoma::visualize_allocation(cfg);
      std::ostringstream payload;
      ldsnoma::write_allocation_csv(payload, table);
      emit(cfg.out, payload.str());
      std::cerr << "r* " << ldsnoma::format_double(table.r_star, 6)
                << ", eta in ["
                << ldsnoma::format_double(table.eta.minCoeff(), 6) << ", "
                << ldsnoma::format_double(table.eta.maxCoeff(), 6) << "] over "
                << table.eta.size() << " sub-channels\n";
      return 0;
    }

    std::vector<ldsnoma::ResultRow> rows;
    if (cfg.experiment == "sweep-k")
      rows = ldsnoma::run_sweep_k(cfg);
    else if (cfg.experiment == "sweep-d")
      rows = ldsnoma::run_sweep_d(cfg);
    else
      rows = ldsnoma::run_evaluate(cfg);
    std::ostringstream payload;
    ldsnoma::write_result_csv(payload, rows, cfg.bits);
    emit(cfg.out, payload.str());
    ldsnoma::print_result_summary(std::cerr, rows, cfg.bits);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
