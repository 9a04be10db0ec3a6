#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace ldsnoma {

/// One power fragment: UE k splits its budget into d_k equal parts, each
/// weighing beta_k * P_k / d_k in the sub-channel balance.
struct Fragment {
  int ue = 0;
  double value = 0.0;  // beta_k * P_k / d_k
  double power = 0.0;  // P_k / d_k [W]
};

/// The d_k fragments per UE for the given balance weights, UE-major order.
std::vector<Fragment> make_fragments(const Scenario& scn,
                                     const Eigen::VectorXd& beta);

/// Working state of the greedy partitioner; exposed so the construction
/// invariants (eta always equals the recomputed weighted loads) can be
/// checked from outside.
struct PartitionState {
  Eigen::VectorXd eta;         // length F: running sums eta_f
  Eigen::MatrixXd assignment;  // F x K: V under construction
  std::vector<int> remaining;  // per UE: fragments not yet placed
};

/// Greedy fragment placement: repeatedly take a fragment of the highest
/// remaining value (ties to the lowest UE index) and put it on the lightest
/// sub-channel not already in that UE's support (ties to the lowest index).
/// Placement adds the fragment's power to the assignment and its value to
/// eta. Fragments of one UE must have equal value and d_u <= F.
PartitionState greedy_fragments(std::span<const Fragment> fragments,
                                int num_subchannels);

/// Alg.-1 spreading design: weights beta_k from the scenario's balance
/// equation, then greedy fragment placement. Every column ends with exactly
/// d_k nonzeros equal to P_k/d_k.
SpreadingMatrix greedy_partition(const Scenario& scn);

/// Local search on a finished placement: move single fragments between
/// sub-channels while the maximum eta strictly decreases, at most
/// max_passes rounds. Kept separate from greedy_partition and unused by it;
/// the plain greedy result is already within the approximation guarantee.
int rebalance_partition(PartitionState& state, std::span<const Fragment> fragments,
                        int max_passes);

/// v_{f,k} = P_k / F everywhere.
SpreadingMatrix dense_spreading(const Scenario& scn);

/// Round-robin regular design: flatten the K*d (UE, slot) pairs UE-major and
/// send pair i to sub-channel i mod F. Requires a common d with d*K divisible
/// by F; every sub-channel then hosts exactly d*K/F UEs and every nonzero is
/// P_k/d.
SpreadingMatrix regular_spreading(const Scenario& scn);

/// Each UE picks d_k distinct sub-channels uniformly at random; nonzeros
/// P_k/d_k.
SpreadingMatrix random_spreading(const Scenario& scn, RandomStream rng);

/// Exact minimum over all feasible placements (distinct sub-channels per UE)
/// of the maximum sub-channel load. Exhaustive search with symmetry pruning;
/// rejects instances with more than 14 fragments or more than 4 sub-channels.
double brute_force_partition(std::span<const Fragment> fragments,
                             int num_subchannels);

}  // namespace ldsnoma
