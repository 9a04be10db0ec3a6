#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ldsnoma/scenario.hpp"

namespace ldsnoma {

/// F x K matrix of nonnegative per-sub-channel transmit powers v_{f,k} [W].
/// Column k is UE k's power split; its nonzero rows form the UE's support.
/// The small-scale fading signs/phases are irrelevant to the ergodic rate,
/// so a code design is fully described by these squared amplitudes.
class SpreadingMatrix {
 public:
  SpreadingMatrix() = default;
  /// Takes ownership of the value matrix; throws std::invalid_argument on
  /// negative entries.
  explicit SpreadingMatrix(Eigen::MatrixXd values);

  int num_subchannels() const { return static_cast<int>(values_.rows()); }
  int num_ues() const { return static_cast<int>(values_.cols()); }

  double operator()(int f, int k) const { return values_(f, k); }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Row indices of the nonzero entries of column k, ascending.
  const std::vector<int>& support(int k) const { return support_[k]; }
  int support_size(int k) const { return static_cast<int>(support_[k].size()); }

  /// Column sum (total transmit power of UE k), accumulated pairwise so the
  /// full-power identity sum_f P/d = P holds exactly for equal splits.
  double column_power(int k) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::vector<int>> support_;
};

/// Checks that V has scn's dimensions, every column spends at most the UE's
/// power budget (within tol) and, when require_sparsity is set, that each
/// column's support size equals the UE's d_k. Throws std::invalid_argument.
void check_conforms(const Scenario& scn, const SpreadingMatrix& v,
                    bool require_sparsity = false, double tol = 1e-9);

/// Text round-trip in sparse triplet form: a header line "F K" followed by
/// one "f k value" line per nonzero, ordered by (k, f), 0-based indices.
void save_spreading(const SpreadingMatrix& v, std::ostream& out);
void save_spreading(const SpreadingMatrix& v, const std::filesystem::path& path);
SpreadingMatrix load_spreading(std::istream& in);
SpreadingMatrix load_spreading(const std::filesystem::path& path);

}  // namespace ldsnoma
