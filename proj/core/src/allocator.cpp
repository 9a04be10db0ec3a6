#include "ldsnoma/allocator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

#include "ldsnoma/detequiv.hpp"

namespace ldsnoma {
namespace {

struct UeGroup {
  int ue = 0;
  double value = 0.0;
  double power = 0.0;
  int count = 0;
};

// Collapses a fragment list into per-UE groups, checking the equal-value
// invariant within each UE.
std::vector<UeGroup> group_by_ue(std::span<const Fragment> fragments) {
  std::vector<UeGroup> groups;
  std::vector<int> position;  // ue -> index into groups, -1 if unseen
  for (const Fragment& frag : fragments) {
    if (frag.ue < 0)
      throw std::invalid_argument("fragment has negative UE index");
    if (!(frag.value > 0.0) || !(frag.power > 0.0))
      throw std::invalid_argument("fragment value and power must be positive");
    if (frag.ue >= static_cast<int>(position.size()))
      position.resize(frag.ue + 1, -1);
    if (position[frag.ue] < 0) {
      position[frag.ue] = static_cast<int>(groups.size());
      groups.push_back({frag.ue, frag.value, frag.power, 1});
    } else {
      UeGroup& g = groups[position[frag.ue]];
      if (g.value != frag.value || g.power != frag.power)
        throw std::invalid_argument(
            "fragments of UE " + std::to_string(frag.ue) +
            " must all have the same value and power");
      ++g.count;
    }
  }
  return groups;
}

}  // namespace

std::vector<Fragment> make_fragments(const Scenario& scn,
                                     const Eigen::VectorXd& beta) {
  if (beta.size() != scn.num_ues())
    throw std::invalid_argument("make_fragments: beta length must equal K");
  std::vector<Fragment> fragments;
  for (int k = 0; k < scn.num_ues(); ++k) {
    const double split = scn.ues[k].power_budget / scn.ues[k].sparsity;
    for (int j = 0; j < scn.ues[k].sparsity; ++j)
      fragments.push_back({k, beta[k] * split, split});
  }
  return fragments;
}

PartitionState greedy_fragments(std::span<const Fragment> fragments,
                                int num_subchannels) {
  if (num_subchannels < 1)
    throw std::invalid_argument("greedy_fragments: need at least one sub-channel");
  std::vector<UeGroup> groups = group_by_ue(fragments);
  int num_ues = 0;
  for (const UeGroup& g : groups) {
    if (g.count > num_subchannels)
      throw std::invalid_argument("UE " + std::to_string(g.ue) + " has " +
                                  std::to_string(g.count) +
                                  " fragments but only " +
                                  std::to_string(num_subchannels) +
                                  " sub-channels exist");
    num_ues = std::max(num_ues, g.ue + 1);
  }

  // Highest fragment value first, ties to the lowest UE index. Because a
  // UE's fragments share one value, the repeated take-the-max rule places
  // them consecutively, which this ordering reproduces.
  std::stable_sort(groups.begin(), groups.end(),
                   [](const UeGroup& a, const UeGroup& b) {
                     if (a.value != b.value) return a.value > b.value;
                     return a.ue < b.ue;
                   });

  PartitionState state;
  state.eta = Eigen::VectorXd::Zero(num_subchannels);
  state.assignment = Eigen::MatrixXd::Zero(num_subchannels, num_ues);
  state.remaining.assign(num_ues, 0);
  for (const UeGroup& g : groups) state.remaining[g.ue] = g.count;

  std::vector<char> used(num_subchannels);
  for (const UeGroup& g : groups) {
    std::fill(used.begin(), used.end(), 0);
    for (int placed = 0; placed < g.count; ++placed) {
      int best = -1;
      for (int f = 0; f < num_subchannels; ++f) {
        if (used[f]) continue;
        if (best < 0 || state.eta[f] < state.eta[best]) best = f;  // tie: lowest f
      }
      used[best] = 1;
      state.assignment(best, g.ue) = g.power;
      state.eta[best] += g.value;
      --state.remaining[g.ue];
    }
  }
  return state;
}

SpreadingMatrix greedy_partition(const Scenario& scn) {
  scn.validate();
  const double r_star = solve_r_star(scn);
  Eigen::VectorXd beta(scn.num_ues());
  for (int k = 0; k < scn.num_ues(); ++k)
    beta[k] = scn.ues[k].pathloss_gain /
              (scn.noise_power +
               scn.ues[k].power_budget * scn.ues[k].pathloss_gain * r_star);
  const std::vector<Fragment> fragments = make_fragments(scn, beta);
  PartitionState state = greedy_fragments(fragments, scn.num_subchannels);
  return SpreadingMatrix(std::move(state.assignment));
}

int rebalance_partition(PartitionState& state, std::span<const Fragment> fragments,
                        int max_passes) {
  const std::vector<UeGroup> groups = group_by_ue(fragments);
  std::vector<double> value_of_ue(state.assignment.cols(), 0.0);
  for (const UeGroup& g : groups) value_of_ue[g.ue] = g.value;

  int moves = 0;
  for (int pass = 0; pass < max_passes; ++pass) {
    int f_max = 0;
    state.eta.maxCoeff(&f_max);
    const double current_max = state.eta[f_max];

    // Best single-fragment move off the heaviest sub-channel.
    int best_ue = -1;
    int best_dst = -1;
    double best_resulting_max = current_max;
    for (int k = 0; k < state.assignment.cols(); ++k) {
      if (!(state.assignment(f_max, k) > 0.0)) continue;
      for (int f = 0; f < state.eta.size(); ++f) {
        if (f == f_max || state.assignment(f, k) > 0.0) continue;
        Eigen::VectorXd eta = state.eta;
        eta[f_max] -= value_of_ue[k];
        eta[f] += value_of_ue[k];
        const double resulting = eta.maxCoeff();
        if (resulting < best_resulting_max) {
          best_resulting_max = resulting;
          best_ue = k;
          best_dst = f;
        }
      }
    }
    if (best_ue < 0) break;
    state.assignment(best_dst, best_ue) = state.assignment(f_max, best_ue);
    state.assignment(f_max, best_ue) = 0.0;
    state.eta[f_max] -= value_of_ue[best_ue];
    state.eta[best_dst] += value_of_ue[best_ue];
    ++moves;
  }
  return moves;
}

SpreadingMatrix dense_spreading(const Scenario& scn) {
  scn.validate();
  Eigen::MatrixXd values(scn.num_subchannels, scn.num_ues());
  for (int k = 0; k < scn.num_ues(); ++k)
    values.col(k).setConstant(scn.ues[k].power_budget / scn.num_subchannels);
  return SpreadingMatrix(std::move(values));
}

SpreadingMatrix regular_spreading(const Scenario& scn) {
  scn.validate();
  const int num_f = scn.num_subchannels;
  const int num_k = scn.num_ues();
  const int d = scn.ues[0].sparsity;
  for (const UeRecord& ue : scn.ues)
    if (ue.sparsity != d)
      throw std::invalid_argument(
          "regular spreading needs a common sparsity; found both " +
          std::to_string(d) + " and " + std::to_string(ue.sparsity));
  if ((static_cast<long long>(num_k) * d) % num_f != 0)
    throw std::invalid_argument(
        "regular spreading needs d*K divisible by F (d=" + std::to_string(d) +
        ", K=" + std::to_string(num_k) + ", F=" + std::to_string(num_f) + ")");

  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(num_f, num_k);
  for (int k = 0; k < num_k; ++k)
    for (int j = 0; j < d; ++j) {
      // Slot k*d + j lands on sub-channel (k*d + j) mod F. The d slots of one
      // UE are consecutive, so with d <= F they hit distinct sub-channels.
      const int f = static_cast<int>((static_cast<long long>(k) * d + j) % num_f);
      values(f, k) = scn.ues[k].power_budget / d;
    }
  SpreadingMatrix v(std::move(values));
  for (int k = 0; k < num_k; ++k)
    if (v.support_size(k) != d)
      throw std::logic_error("regular spreading produced a repeated sub-channel");
  return v;
}

SpreadingMatrix random_spreading(const Scenario& scn, RandomStream rng) {
  scn.validate();
  const int num_f = scn.num_subchannels;
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(num_f, scn.num_ues());
  std::vector<int> pool(num_f);
  for (int k = 0; k < scn.num_ues(); ++k) {
    const int d = scn.ues[k].sparsity;
    // Partial Fisher-Yates: the first d entries of pool become the support.
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < d; ++j) {
      const auto pick = j + static_cast<int>(rng.uniform_index(num_f - j));
      std::swap(pool[j], pool[pick]);
      values(pool[j], k) = scn.ues[k].power_budget / d;
    }
  }
  return SpreadingMatrix(std::move(values));
}

double brute_force_partition(std::span<const Fragment> fragments,
                             int num_subchannels) {
  if (num_subchannels < 1 || num_subchannels > 4)
    throw std::invalid_argument(
        "brute_force_partition handles 1 to 4 sub-channels, got " +
        std::to_string(num_subchannels));
  if (fragments.size() > 14)
    throw std::invalid_argument(
        "brute_force_partition handles at most 14 fragments, got " +
        std::to_string(fragments.size()));
  if (fragments.empty()) return 0.0;

  std::vector<UeGroup> groups = group_by_ue(fragments);
  for (const UeGroup& g : groups)
    if (g.count > num_subchannels)
      throw std::invalid_argument("UE " + std::to_string(g.ue) +
                                  " has more fragments than sub-channels");

  // All supports of a given size, as bitmasks over sub-channels.
  std::vector<std::vector<unsigned>> supports_of_size(num_subchannels + 1);
  for (unsigned mask = 1; mask < (1u << num_subchannels); ++mask)
    supports_of_size[std::popcount(mask)].push_back(mask);

  // Remaining total value after each group, for the fractional bound
  // max eta >= (placed + remaining) / F.
  std::vector<double> remaining_after(groups.size() + 1, 0.0);
  for (std::size_t i = groups.size(); i-- > 0;)
    remaining_after[i] =
        remaining_after[i + 1] + groups[i].value * groups[i].count;

  // A feasible placement bounds the optimum from above.
  double best = greedy_fragments(fragments, num_subchannels).eta.maxCoeff();

  // Depth-first over per-UE supports, loads passed by value so siblings see
  // bit-identical sums. Bin loads are interchangeable, so states revisited
  // with the same sorted load tuple at the same depth are skipped.
  std::set<std::tuple<std::size_t, double, double, double, double>> seen;
  const auto dfs = [&](const auto& self, std::size_t depth,
                       const std::array<double, 4>& eta) -> void {
    const double placed_max = *std::max_element(eta.begin(), eta.end());
    if (depth == groups.size()) {
      best = std::min(best, placed_max);
      return;
    }
    const double lower = std::max(
        placed_max,
        (std::accumulate(eta.begin(), eta.begin() + num_subchannels, 0.0) +
         remaining_after[depth]) /
            num_subchannels);
    if (lower >= best) return;
    std::array<double, 4> sorted = eta;
    std::sort(sorted.begin(), sorted.end());
    if (!seen.insert(std::make_tuple(depth, sorted[0], sorted[1], sorted[2],
                                     sorted[3]))
             .second)
      return;
    const UeGroup& g = groups[depth];
    for (const unsigned mask : supports_of_size[g.count]) {
      std::array<double, 4> next = eta;
      for (int f = 0; f < num_subchannels; ++f)
        if (mask & (1u << f)) next[f] += g.value;
      self(self, depth + 1, next);
    }
  };
  dfs(dfs, 0, {0.0, 0.0, 0.0, 0.0});
  return best;
}

}  // namespace ldsnoma
