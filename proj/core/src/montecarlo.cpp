#include "ldsnoma/montecarlo.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldsnoma/allocator.hpp"
#include "ldsnoma/channel.hpp"
#include "ldsnoma/detequiv.hpp"
#include "ldsnoma/errors.hpp"
#include "ldsnoma/parallel.hpp"
#include "ldsnoma/textio.hpp"

namespace ldsnoma {

double logdet_hermitian(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n)
    throw std::invalid_argument("logdet_hermitian: matrix must be square");
  if (n == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  const double herm_gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_gap > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument(
        "logdet_hermitian: matrix is not Hermitian (asymmetry " +
        format_double(herm_gap, 6) + " at scale " + format_double(scale, 6) +
        ")");

  // In-place lower Cholesky on a working copy; only the lower triangle is
  // referenced. logdet = 2 sum_j log L_jj.
  Eigen::MatrixXcd l = m;
  double logdet = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = l(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > 0.0))
      throw NotPositiveDefiniteError(
          "logdet_hermitian: pivot " + std::to_string(j) +
              " is not positive (" + format_double(pivot, 6) + ")",
          j, pivot);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    logdet += 2.0 * std::log(ljj);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      std::complex<double> acc = l(i, j);
      for (Eigen::Index k = 0; k < j; ++k)
        acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  return logdet;
}

namespace {

// One fading draw's (1/F) log det(I + Gram/sigma^2) with the factorization
// on the smaller Gram side.
double emi_one_draw(const Scenario& scn, const SpreadingMatrix& v,
                    RandomStream rng) {
  const Eigen::MatrixXcd h = sample_channel(scn, v, std::move(rng));
  const double inv_s2 = 1.0 / scn.noise_power;
  const Eigen::Index side = std::min(h.rows(), h.cols());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(side, side);
  if (h.rows() <= h.cols()) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(h, inv_s2);
  } else {
    const Eigen::MatrixXcd ha = h.adjoint();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(ha, inv_s2);
  }
  // Mirror the lower triangle and add the identity; the result is Hermitian
  // to the bit.
  for (Eigen::Index j = 0; j < side; ++j) {
    gram(j, j) = std::complex<double>(gram(j, j).real() + 1.0, 0.0);
    for (Eigen::Index i = j + 1; i < side; ++i) gram(j, i) = std::conj(gram(i, j));
  }
  return logdet_hermitian(gram) / scn.num_subchannels;
}

double sample_variance(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean;
    sq[i] = dx * dx;
  }
  return pairwise_sum(sq) / (static_cast<double>(xs.size()) - 1.0);
}

}  // namespace

MCEstimate mc_emi(const Scenario& scn, const SpreadingMatrix& v, int trials,
                  RandomStream rng, std::uint64_t trial_offset) {
  scn.validate();
  check_conforms(scn, v);
  if (trials < 1) throw std::invalid_argument("mc_emi: trials must be >= 1");

  std::vector<double> values(trials);
  parallel_for(0, static_cast<std::size_t>(trials), [&](std::size_t t) {
    values[t] = emi_one_draw(scn, v, rng.substream(trial_offset + t));
  });

  MCEstimate est;
  est.trials = trials;
  est.mean = pairwise_sum(values) / trials;
  est.std_error = std::sqrt(sample_variance(values, est.mean) / trials);
  return est;
}

EpsilonStats epsilon_stats(const Scenario& scn, int d, int n_matrices,
                           int trials_per_matrix, RandomStream rng) {
  scn.validate();
  if (d < 1 || d > scn.num_subchannels)
    throw std::invalid_argument("epsilon_stats: d must be in [1, F]");
  if (n_matrices < 2)
    throw std::invalid_argument("epsilon_stats: need at least 2 matrices");
  if (trials_per_matrix < 1)
    throw std::invalid_argument("epsilon_stats: need at least 1 trial");

  Scenario scn_d = scn;
  for (UeRecord& ue : scn_d.ues) ue.sparsity = d;

  // Substream 0 feeds the matrix draws; substream 1 is the fading base shared
  // by every matrix (and by every d on the same parent stream), so epsilon
  // differences across matrices and sparsities ride on common random numbers.
  RandomStream matrix_rng = rng.substream(0);
  const RandomStream fading_rng = rng.substream(1);

  // Random sparse designs can need far more alternating sweeps than typical
  // matrices when a strong UE sits nearly alone on a sub-channel, so the
  // iteration budget here is well above the solver default.
  const FixedPointOptions fp_opts{1e-12, 200000, 0.0};

  std::vector<double> eps(n_matrices);
  std::vector<double> per_matrix_se(n_matrices);
  for (int i = 0; i < n_matrices; ++i) {
    const SpreadingMatrix v = random_spreading(scn_d, matrix_rng.substream(i));
    const MCEstimate mc = mc_emi(scn_d, v, trials_per_matrix, fading_rng);
    eps[i] = mc.mean - det_emi(scn_d, v, fp_opts);
    per_matrix_se[i] = mc.std_error;
  }

  EpsilonStats stats;
  stats.d = d;
  stats.samples = n_matrices;
  stats.mean_eps = pairwise_sum(eps) / n_matrices;
  stats.var_eps = sample_variance(eps, stats.mean_eps);
  // Common random numbers correlate the per-matrix MC errors, so averaging
  // the standard errors (no 1/sqrt(n) shrinkage) is the safe upper bound.
  stats.propagated_std_error = pairwise_sum(per_matrix_se) / n_matrices;
  return stats;
}

}  // namespace ldsnoma
