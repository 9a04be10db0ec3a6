#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldsnoma/detequiv.hpp"
#include "ldsnoma/keyvalue.hpp"
#include "ldsnoma/montecarlo.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace ldsnoma {

/// Spreading-matrix construction methods compared throughout.
enum class Method { greedy, regular, random, dense };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// One experiment description: defaults follow the evaluation protocol of
/// the source system study (1000 drops x 1000 fading draws, F = 50).
struct ExperimentConfig {
  std::string experiment = "evaluate";  // evaluate | sweep-k | sweep-d |
                                        // epsilon | allocate | visualize
  int F = 50;
  std::vector<int> K = {150};
  std::vector<int> d = {2};
  int drops = 1000;
  int fading_trials = 1000;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::greedy, Method::regular,
                                 Method::random, Method::dense};
  std::string out;   // CSV destination; empty = stdout
  bool bits = true;  // emit rates in bits (false: nats)
  int threads = 0;   // 0 = library default
  /// Iteration budget for fixed points inside experiments. Random and greedy
  /// designs at d = 1 can place a strong UE nearly alone on a sub-channel,
  /// where the alternating map contracts like 1 - 1/sqrt(SNR); tens of
  /// thousands of sweeps are then normal, hence a budget well above the
  /// solver's standalone default.
  int fp_max_iter = 200000;
  std::string scenario_path;  // when set: evaluate this drop instead of drawing
  std::string matrix_path;    // when set with evaluate: score this stored matrix
};

/// Builds a config from a parsed key-value document; unknown keys and
/// malformed values are reported together in one diagnostic.
ExperimentConfig config_from_doc(const KeyValueDoc& doc);

/// Checks cross-field requirements (non-empty lists, positive counts, the
/// kind being known); throws std::invalid_argument naming every violation.
void validate_config(const ExperimentConfig& cfg);

/// One method's scores on one drop.
struct ResultRow {
  std::string method;
  int F = 0;
  int K = 0;
  int d = 0;
  std::uint64_t drop_seed = 0;  // substream id the drop was drawn from
  double det_emi_nats = 0.0;
  std::optional<double> mc_emi_nats;
  std::optional<double> mc_std_error_nats;
  double eta_max = 0.0;
  double eta_min = 0.0;
  double kkt_residual_max = 0.0;
};

/// Evaluates every configured method on the drop with the given index,
/// sharing the drop's scenario and fading substreams across methods so
/// method comparisons ride on common random numbers. Pure function of
/// (cfg.seed, K, d, drop_index, cfg.methods, cfg.fading_trials), which is
/// what makes interrupted sweeps resumable drop by drop.
std::vector<ResultRow> evaluate_drop(const ExperimentConfig& cfg, int K, int d,
                                     std::uint64_t drop_index);

/// Drop-level sweeps; rows come out sorted by (F, K, d, method, drop_seed)
/// no matter how the parallel drops complete. sweep-k varies cfg.K at
/// d = cfg.d.front(); sweep-d varies cfg.d at K = cfg.K.front().
std::vector<ResultRow> run_sweep_k(const ExperimentConfig& cfg);
std::vector<ResultRow> run_sweep_d(const ExperimentConfig& cfg);

/// Single-cell run: cfg.K.front() and cfg.d.front() over cfg.drops drops,
/// or a stored scenario/matrix when paths are set.
std::vector<ResultRow> run_evaluate(const ExperimentConfig& cfg);

/// Residual-term statistics on one fixed drop for each d in cfg.d, with
/// cfg.drops random matrices per d and cfg.fading_trials draws per matrix.
/// All d values share matrix and fading substreams (common random numbers).
std::vector<EpsilonStats> run_epsilon(const ExperimentConfig& cfg);

/// One nonzero of an allocation, annotated for external heat-map plotting.
struct AllocationRow {
  int f = 0;
  int k = 0;
  double v = 0.0;     // transmit power [W]
  double beta = 0.0;  // UE balance weight
  double eta = 0.0;   // final load of sub-channel f
};

struct AllocationTable {
  double r_star = 0.0;
  Eigen::VectorXd eta;  // length F
  std::vector<AllocationRow> rows;  // sorted by (f, k)
};

/// Greedy allocation of one drop (or stored scenario), flattened to
/// triplets; cfg defaults here mirror the F=30, K=90, d=2 illustration.
AllocationTable visualize_allocation(const ExperimentConfig& cfg);

/// CSV emission. Fixed headers, documented in the README; all numbers are
/// printed with 12 significant digits so identical results are identical
/// bytes. Rates are multiplied by 1/ln 2 exactly once, here, when bits is
/// set; the sparsity-gain column is mc - det per row, empty when MC is off.
void write_result_csv(std::ostream& out, std::span<const ResultRow> rows,
                      bool bits);
void write_epsilon_csv(std::ostream& out, std::span<const EpsilonStats> stats,
                       bool bits);
void write_allocation_csv(std::ostream& out, const AllocationTable& table);

/// Human-readable digest: drop-averaged rates per (F, K, d, method) and the
/// relative gain of greedy over each other method, as ratios of the
/// drop-averaged rates.
void print_result_summary(std::ostream& out, std::span<const ResultRow> rows,
                          bool bits);

}  // namespace ldsnoma
