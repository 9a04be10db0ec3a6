#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ldsnoma/random.hpp"

namespace ldsnoma {

/// Per-UE parameters of an uplink drop.
struct UeRecord {
  double pathloss_gain = 0.0;  // a_k^2, linear power gain of the path
  double power_budget = 0.0;   // P_k [W]
  int sparsity = 0;            // d_k, number of sub-channels the UE occupies
};

/// One system drop: F sub-channels, receiver noise power, and K UEs.
struct Scenario {
  int num_subchannels = 0;  // F
  double noise_power = 0.0;  // sigma^2 [W]
  std::vector<UeRecord> ues;

  int num_ues() const { return static_cast<int>(ues.size()); }

  Eigen::VectorXd pathloss_gains() const;
  Eigen::VectorXd power_budgets() const;
  std::vector<int> sparsities() const;

  /// Throws std::invalid_argument unless F >= 1, sigma^2 > 0, K >= 1 and
  /// every UE has positive gain and power and 1 <= d_k <= F.
  void validate() const;
};

/// Draws a drop with i.i.d. path losses uniform in [-150, -60] dB, unit
/// power budgets, noise power -120 dBW and a common sparsity target d.
Scenario make_drop(int num_subchannels, int num_ues, int sparsity,
                   RandomStream rng);

/// Text round-trip. The format is the key-value document
///   F, K, sigma2_dBW, pathloss_dB (K values), power_W (K values),
///   sparsity (K values)
/// with gains stored in dB and converted back to linear on load.
void save_scenario(const Scenario& scn, std::ostream& out);
void save_scenario(const Scenario& scn, const std::filesystem::path& path);
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace ldsnoma
