#include "ldsnoma/experiments.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ldsnoma/allocator.hpp"
#include "ldsnoma/parallel.hpp"
#include "ldsnoma/textio.hpp"
#include "ldsnoma/units.hpp"

namespace ldsnoma {

std::string to_string(Method m) {
  switch (m) {
    case Method::greedy: return "greedy";
    case Method::regular: return "regular";
    case Method::random: return "random";
    case Method::dense: return "dense";
  }
  throw std::logic_error("unreachable method value");
}

Method method_from_string(const std::string& name) {
  if (name == "greedy") return Method::greedy;
  if (name == "regular") return Method::regular;
  if (name == "random") return Method::random;
  if (name == "dense") return Method::dense;
  throw std::invalid_argument(
      "unknown method '" + name +
      "' (expected greedy, regular, random or dense)");
}

namespace {

// Fixed purposes of a drop stream's children; everything a drop needs is
// derived from these, so a drop is reproducible in isolation.
constexpr std::uint64_t kScenarioSub = 0;
constexpr std::uint64_t kAllocationSub = 1;
constexpr std::uint64_t kFadingSub = 2;

int method_rank(const std::string& name) {
  if (name == "greedy") return 0;
  if (name == "regular") return 1;
  if (name == "random") return 2;
  if (name == "dense") return 3;
  return 4;  // stored-matrix labels sort after the built-ins
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::make_tuple(a.F, a.K, a.d, method_rank(a.method),
                                     a.method, a.drop_seed) <
                     std::make_tuple(b.F, b.K, b.d, method_rank(b.method),
                                     b.method, b.drop_seed);
            });
}

// Methods in canonical order with duplicates dropped.
std::vector<Method> canonical_methods(std::span<const Method> methods) {
  std::vector<Method> out(methods.begin(), methods.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int common_sparsity(const Scenario& scn) {
  const int d = scn.ues.empty() ? 0 : scn.ues[0].sparsity;
  for (const UeRecord& ue : scn.ues)
    if (ue.sparsity != d) return 0;  // mixed-sparsity scenarios report d = 0
  return d;
}

SpreadingMatrix build_method(const Scenario& scn, Method m, RandomStream rng) {
  switch (m) {
    case Method::greedy: return greedy_partition(scn);
    case Method::regular: return regular_spreading(scn);
    case Method::random: return random_spreading(scn, std::move(rng));
    case Method::dense: return dense_spreading(scn);
  }
  throw std::logic_error("unreachable method value");
}

ResultRow score_matrix(const ExperimentConfig& cfg, const Scenario& scn,
                       const SpreadingMatrix& v, std::string method_name,
                       const RandomStream& drop_rng) {
  const FixedPointOptions fp_opts{1e-12, cfg.fp_max_iter, 0.0};
  ResultRow row;
  row.method = std::move(method_name);
  row.F = scn.num_subchannels;
  row.K = scn.num_ues();
  row.d = common_sparsity(scn);
  row.drop_seed = drop_rng.stream_id();
  row.det_emi_nats = det_emi(scn, v, solve_fixed_point(scn, v, fp_opts));
  if (cfg.fading_trials > 0) {
    const MCEstimate mc =
        mc_emi(scn, v, cfg.fading_trials, drop_rng.substream(kFadingSub));
    row.mc_emi_nats = mc.mean;
    row.mc_std_error_nats = mc.std_error;
  }
  const OptimalityCertificate cert = certificate(scn, v);
  row.eta_max = cert.eta.maxCoeff();
  row.eta_min = cert.eta.minCoeff();
  row.kkt_residual_max =
      std::max(cert.max_subchannel_residual(), cert.max_power_residual());
  return row;
}

// All configured methods on one scenario. The fading substream is shared by
// every method (common random numbers), and the allocation substream is
// consumed only by methods that draw.
std::vector<ResultRow> evaluate_methods(const ExperimentConfig& cfg,
                                        const Scenario& scn,
                                        const RandomStream& drop_rng) {
  std::vector<ResultRow> rows;
  for (const Method m : canonical_methods(cfg.methods)) {
    const SpreadingMatrix v =
        build_method(scn, m, drop_rng.substream(kAllocationSub));
    rows.push_back(score_matrix(cfg, scn, v, to_string(m), drop_rng));
  }
  return rows;
}

std::vector<ResultRow> sweep_cells(
    const ExperimentConfig& cfg,
    const std::vector<std::pair<int, int>>& cells) {
  const std::size_t drops = static_cast<std::size_t>(cfg.drops);
  std::vector<std::vector<ResultRow>> slots(cells.size() * drops);
  parallel_for(0, slots.size(), [&](std::size_t i) {
    const auto [K, d] = cells[i / drops];
    slots[i] = evaluate_drop(cfg, K, d, i % drops);
  });
  std::vector<ResultRow> rows;
  for (auto& slot : slots)
    rows.insert(rows.end(), std::make_move_iterator(slot.begin()),
                std::make_move_iterator(slot.end()));
  sort_rows(rows);
  return rows;
}

}  // namespace

ExperimentConfig config_from_doc(const KeyValueDoc& doc) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  const std::set<std::string> known = {
      "experiment", "F",       "K",       "d",   "drops",
      "fading_trials", "trials", "seed",  "methods", "out",
      "units",      "threads", "fp_max_iter", "scenario", "matrix"};
  for (const std::string& key : doc.keys())
    if (!known.count(key)) problems.push_back("unknown key '" + key + "'");

  const auto grab = [&problems](const std::string& key, const auto& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.push_back(std::string(e.what()) +
                         (std::string(e.what()).find(key) == std::string::npos
                              ? " (key '" + key + "')"
                              : ""));
    }
  };

  if (doc.has("experiment"))
    grab("experiment", [&] { cfg.experiment = doc.get_string("experiment"); });
  if (doc.has("F"))
    grab("F", [&] { cfg.F = static_cast<int>(doc.get_int("F")); });
  if (doc.has("K")) grab("K", [&] {
      cfg.K.clear();
      for (const long long k : doc.get_ints("K"))
        cfg.K.push_back(static_cast<int>(k));
    });
  if (doc.has("d")) grab("d", [&] {
      cfg.d.clear();
      for (const long long d : doc.get_ints("d"))
        cfg.d.push_back(static_cast<int>(d));
    });
  if (doc.has("drops"))
    grab("drops", [&] { cfg.drops = static_cast<int>(doc.get_int("drops")); });
  if (doc.has("fading_trials") && doc.has("trials"))
    problems.push_back("'trials' and 'fading_trials' are aliases; give one");
  if (doc.has("fading_trials"))
    grab("fading_trials", [&] {
      cfg.fading_trials = static_cast<int>(doc.get_int("fading_trials"));
    });
  if (doc.has("trials"))
    grab("trials",
         [&] { cfg.fading_trials = static_cast<int>(doc.get_int("trials")); });
  if (doc.has("seed")) grab("seed", [&] { cfg.seed = doc.get_u64("seed"); });
  if (doc.has("methods")) grab("methods", [&] {
      cfg.methods.clear();
      for (const std::string& name : doc.get_strings("methods"))
        cfg.methods.push_back(method_from_string(name));
    });
  if (doc.has("out")) grab("out", [&] { cfg.out = doc.get_string("out"); });
  if (doc.has("units")) grab("units", [&] {
      const std::string units = doc.get_string("units");
      if (units == "bits")
        cfg.bits = true;
      else if (units == "nats")
        cfg.bits = false;
      else
        throw std::invalid_argument("units must be 'bits' or 'nats', got '" +
                                    units + "'");
    });
  if (doc.has("threads"))
    grab("threads",
         [&] { cfg.threads = static_cast<int>(doc.get_int("threads")); });
  if (doc.has("fp_max_iter"))
    grab("fp_max_iter", [&] {
      cfg.fp_max_iter = static_cast<int>(doc.get_int("fp_max_iter"));
    });
  if (doc.has("scenario"))
    grab("scenario", [&] { cfg.scenario_path = doc.get_string("scenario"); });
  if (doc.has("matrix"))
    grab("matrix", [&] { cfg.matrix_path = doc.get_string("matrix"); });

  if (!problems.empty()) {
    std::string joined = "invalid config:";
    for (const std::string& p : problems) joined += "\n  - " + p;
    throw std::invalid_argument(joined);
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  const std::set<std::string> kinds = {"evaluate", "sweep-k", "sweep-d",
                                       "epsilon", "allocate", "visualize"};
  if (!kinds.count(cfg.experiment))
    problems.push_back("experiment '" + cfg.experiment + "' is not one of " +
                       "evaluate/sweep-k/sweep-d/epsilon/allocate/visualize");
  if (cfg.F < 1) problems.push_back("F must be >= 1");
  if (cfg.K.empty()) problems.push_back("K list must not be empty");
  for (const int k : cfg.K)
    if (k < 1) problems.push_back("K values must be >= 1");
  if (cfg.d.empty()) problems.push_back("d list must not be empty");
  for (const int d : cfg.d)
    if (d < 1 || d > cfg.F)
      problems.push_back("d = " + std::to_string(d) + " outside [1, F]");
  if (cfg.drops < 1) problems.push_back("drops must be >= 1");
  if (cfg.experiment == "epsilon" && cfg.drops < 2)
    problems.push_back("epsilon needs drops >= 2 (matrices per d)");
  if (cfg.fading_trials < 0) problems.push_back("fading_trials must be >= 0");
  if (cfg.experiment == "epsilon" && cfg.fading_trials < 1)
    problems.push_back("epsilon needs fading_trials >= 1");
  if (cfg.methods.empty() && cfg.matrix_path.empty())
    problems.push_back("methods list must not be empty");
  if (!cfg.matrix_path.empty() && cfg.scenario_path.empty())
    problems.push_back("matrix requires a scenario file to score against");
  if (cfg.fp_max_iter < 1) problems.push_back("fp_max_iter must be >= 1");
  if (cfg.threads < 0) problems.push_back("threads must be >= 0");
  if (!problems.empty()) {
    std::string joined = "invalid config:";
    for (const std::string& p : problems) joined += "\n  - " + p;
    throw std::invalid_argument(joined);
  }
}

std::vector<ResultRow> evaluate_drop(const ExperimentConfig& cfg, int K, int d,
                                     std::uint64_t drop_index) {
  const RandomStream drop_rng = RandomStream(cfg.seed).substream(drop_index);
  const Scenario scn = make_drop(cfg.F, K, d, drop_rng.substream(kScenarioSub));
  return evaluate_methods(cfg, scn, drop_rng);
}

std::vector<ResultRow> run_sweep_k(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<std::pair<int, int>> cells;
  for (const int k : cfg.K) cells.emplace_back(k, cfg.d.front());
  return sweep_cells(cfg, cells);
}

std::vector<ResultRow> run_sweep_d(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<std::pair<int, int>> cells;
  for (const int d : cfg.d) cells.emplace_back(cfg.K.front(), d);
  return sweep_cells(cfg, cells);
}

std::vector<ResultRow> run_evaluate(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (!cfg.scenario_path.empty()) {
    const Scenario scn = load_scenario(cfg.scenario_path);
    const RandomStream rng(cfg.seed);  // stream id 0 labels the stored drop
    std::vector<ResultRow> rows;
    if (!cfg.matrix_path.empty()) {
      const SpreadingMatrix v = load_spreading(cfg.matrix_path);
      rows.push_back(score_matrix(cfg, scn, v, "file", rng));
    } else {
      rows = evaluate_methods(cfg, scn, rng);
    }
    sort_rows(rows);
    return rows;
  }
  return sweep_cells(cfg, {{cfg.K.front(), cfg.d.front()}});
}

std::vector<EpsilonStats> run_epsilon(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomStream rng(cfg.seed);
  // The drop's path losses do not depend on the sparsity placeholder, and
  // epsilon_stats overrides d anyway.
  const Scenario scn =
      !cfg.scenario_path.empty()
          ? load_scenario(cfg.scenario_path)
          : make_drop(cfg.F, cfg.K.front(), 1, rng.substream(kScenarioSub));
  std::vector<EpsilonStats> stats;
  for (const int d : cfg.d)
    stats.push_back(
        epsilon_stats(scn, d, cfg.drops, cfg.fading_trials, rng.substream(1)));
  return stats;
}

AllocationTable visualize_allocation(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const RandomStream rng(cfg.seed);
  const Scenario scn =
      !cfg.scenario_path.empty()
          ? load_scenario(cfg.scenario_path)
          : make_drop(cfg.F, cfg.K.front(), cfg.d.front(),
                      rng.substream(kScenarioSub));
  const SpreadingMatrix v = greedy_partition(scn);
  const OptimalityCertificate cert = certificate(scn, v);

  AllocationTable table;
  table.r_star = cert.r_star;
  table.eta = cert.eta;
  for (int f = 0; f < scn.num_subchannels; ++f)
    for (int k = 0; k < scn.num_ues(); ++k)
      if (v(f, k) > 0.0)
        table.rows.push_back({f, k, v(f, k), cert.beta[k], cert.eta[f]});
  return table;
}

namespace {

std::string rate_cell(double nats, bool bits) {
  return format_double(bits ? nats * kNatsToBits : nats, 12);
}

}  // namespace

void write_result_csv(std::ostream& out, std::span<const ResultRow> rows,
                      bool bits) {
  const char* unit = bits ? "bits" : "nats";
  out << "method,F,K,d,drop_seed,det_emi_" << unit << ",mc_emi_" << unit
      << ",mc_stderr_" << unit << ",sparsity_gain_" << unit
      << ",eta_max,eta_min,kkt_residual_max\n";
  for (const ResultRow& row : rows) {
    out << row.method << ',' << row.F << ',' << row.K << ',' << row.d << ','
        << row.drop_seed << ',' << rate_cell(row.det_emi_nats, bits) << ',';
    if (row.mc_emi_nats) out << rate_cell(*row.mc_emi_nats, bits);
    out << ',';
    if (row.mc_std_error_nats) out << rate_cell(*row.mc_std_error_nats, bits);
    out << ',';
    if (row.mc_emi_nats)
      out << rate_cell(*row.mc_emi_nats - row.det_emi_nats, bits);
    out << ',' << format_double(row.eta_max, 12) << ','
        << format_double(row.eta_min, 12) << ','
        << format_double(row.kkt_residual_max, 12) << '\n';
  }
}

void write_epsilon_csv(std::ostream& out, std::span<const EpsilonStats> stats,
                       bool bits) {
  const char* unit = bits ? "bits" : "nats";
  const double f = bits ? kNatsToBits : 1.0;
  out << "d,mean_eps_" << unit << ",var_eps_" << unit << "2,propagated_stderr_"
      << unit << ",samples\n";
  for (const EpsilonStats& s : stats)
    out << s.d << ',' << format_double(s.mean_eps * f, 12) << ','
        << format_double(s.var_eps * f * f, 12) << ','
        << format_double(s.propagated_std_error * f, 12) << ',' << s.samples
        << '\n';
}

void write_allocation_csv(std::ostream& out, const AllocationTable& table) {
  out << "f,k,v_W,beta,eta\n";
  for (const AllocationRow& row : table.rows)
    out << row.f << ',' << row.k << ',' << format_double(row.v, 12) << ','
        << format_double(row.beta, 12) << ',' << format_double(row.eta, 12)
        << '\n';
}

void print_result_summary(std::ostream& out, std::span<const ResultRow> rows,
                          bool bits) {
  const char* unit = bits ? "bits" : "nats";
  const double factor = bits ? kNatsToBits : 1.0;

  using CellKey = std::tuple<int, int, int>;  // (F, K, d)
  std::map<CellKey, std::map<std::string, std::vector<const ResultRow*>>> cells;
  for (const ResultRow& row : rows)
    cells[{row.F, row.K, row.d}][row.method].push_back(&row);

  for (const auto& [key, by_method] : cells) {
    const auto [F, K, d] = key;
    out << "F=" << F << " K=" << K << " d=" << d << '\n';
    std::map<std::string, double> mean_det;
    for (const auto& [method, cell_rows] : by_method) {
      std::vector<double> det;
      std::vector<double> mc;
      for (const ResultRow* row : cell_rows) {
        det.push_back(row->det_emi_nats);
        if (row->mc_emi_nats) mc.push_back(*row->mc_emi_nats);
      }
      const double det_mean = pairwise_sum(det) / det.size();
      mean_det[method] = det_mean;
      out << "  " << method << ": det " << format_double(det_mean * factor, 6)
          << ' ' << unit;
      if (!mc.empty())
        out << ", mc " << format_double(pairwise_sum(mc) / mc.size() * factor, 6)
            << ' ' << unit;
      out << " (" << cell_rows.size() << " drops)\n";
    }
    if (mean_det.count("greedy"))
      for (const auto& [method, det_mean] : mean_det)
        if (method != "greedy" && det_mean > 0.0)
          out << "  greedy over " << method << ": "
              << format_double((mean_det["greedy"] / det_mean - 1.0) * 100.0, 4)
              << "%\n";
  }
}

}  // namespace ldsnoma
