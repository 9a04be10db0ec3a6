#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace ldsnoma {

/// log det M for Hermitian positive-definite M, via an in-place complex
/// Cholesky factorization. M must be Hermitian within 1e-10 relative; a
/// non-positive pivot throws NotPositiveDefiniteError naming its index.
double logdet_hermitian(const Eigen::MatrixXcd& m);

/// Monte-Carlo estimate of the ergodic mutual information, nats per
/// sub-channel use.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(trials)
  int trials = 0;
};

/// Averages (1/F) log det(I + (1/sigma^2) Gram) over fading draws, with
/// Gram = H H^H when F <= K and H^H H otherwise (same determinant, smaller
/// factorization). Trial t draws its channel from rng.substream(trial_offset
/// + t), and the average is a pairwise sum over the per-trial values in
/// index order, so results are independent of thread count and execution
/// order, and a (2N)-trial mean equals the pooled mean of two N-trial runs
/// on offsets 0 and N exactly.
MCEstimate mc_emi(const Scenario& scn, const SpreadingMatrix& v, int trials,
                  RandomStream rng, std::uint64_t trial_offset = 0);

/// Statistics of the residual term (exact EMI minus deterministic
/// equivalent) over random sparse designs of a common sparsity d.
struct EpsilonStats {
  int d = 0;
  double mean_eps = 0.0;            // nats per sub-channel use
  double var_eps = 0.0;             // sample variance across matrices
  double propagated_std_error = 0.0;  // MC uncertainty of mean_eps, see below
  int samples = 0;
};

/// Draws n_matrices random spreading matrices of sparsity d (overriding the
/// scenario's own d_k), estimates each one's EMI with trials_per_matrix
/// fading draws, subtracts its deterministic equivalent and reports the
/// mean and sample variance across matrices. All matrices share the same
/// per-trial fading substreams (common random numbers), which cancels most
/// fading noise from cross-d comparisons; because those errors are
/// correlated, propagated_std_error is the conservative average of the
/// per-matrix standard errors rather than an independent-samples formula.
EpsilonStats epsilon_stats(const Scenario& scn, int d, int n_matrices,
                           int trials_per_matrix, RandomStream rng);

}  // namespace ldsnoma
