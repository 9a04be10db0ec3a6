#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ldsnoma/detequiv.hpp"
#include "ldsnoma/errors.hpp"
#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

using ldsnoma::certificate;
using ldsnoma::det_emi;
using ldsnoma::FixedPointOptions;
using ldsnoma::FixedPointSolution;
using ldsnoma::make_drop;
using ldsnoma::RandomStream;
using ldsnoma::Scenario;
using ldsnoma::solve_fixed_point;
using ldsnoma::solve_r_star;
using ldsnoma::SpreadingMatrix;

namespace {

// Fixed point of x = 1/(1+x): the positive root of x^2 + x - 1.
constexpr double kGoldenConjugate = 0.6180339887498949;

// F identical UEs on F sub-channels with P a^2 / sigma^2 = 1. Under the
// equal dense split every coordinate of the coupled system collapses to the
// scalar map x = 1/(1+x), so r = r~ = (sqrt(5)-1)/2 exactly.
Scenario unit_snr_scenario(int n) {
  Scenario scn;
  scn.num_subchannels = n;
  scn.noise_power = 1e-12;
  scn.ues.assign(n, ldsnoma::UeRecord{1e-12, 1.0, n});
  return scn;
}

SpreadingMatrix equal_dense(const Scenario& scn) {
  return SpreadingMatrix(Eigen::MatrixXd::Constant(
      scn.num_subchannels, scn.num_ues(), 1.0 / scn.num_subchannels));
}

}  // namespace

TEST_CASE("zero spreading converges in one sweep to the no-load point") {
  const Scenario scn = make_drop(3, 2, 1, RandomStream(1));
  const SpreadingMatrix v(Eigen::MatrixXd::Zero(3, 2));
  const FixedPointSolution sol = solve_fixed_point(scn, v);
  CHECK(sol.iterations == 1);
  CHECK(sol.final_residual == 0.0);
  CHECK((sol.r.array() == 1.0).all());
  CHECK((sol.r_tilde.array() == 1.0).all());
  CHECK(det_emi(scn, v, sol) == 0.0);
}

TEST_CASE("symmetric unit-SNR instance hits the golden-ratio fixed point") {
  const Scenario scn = unit_snr_scenario(4);
  const SpreadingMatrix v = equal_dense(scn);
  const FixedPointSolution sol = solve_fixed_point(scn, v);

  for (int f = 0; f < 4; ++f)
    CHECK(sol.r[f] == doctest::Approx(kGoldenConjugate).epsilon(1e-10));
  for (int k = 0; k < 4; ++k)
    CHECK(sol.r_tilde[k] == doctest::Approx(kGoldenConjugate).epsilon(1e-10));

  // Closed form from the scalar collapse: J = 2 log(1 + x) - x^2 with
  // 1 + x = 1/x, i.e. J = -2 log x - x^2 nats per sub-channel use.
  const double expected =
      -2.0 * std::log(kGoldenConjugate) - kGoldenConjugate * kGoldenConjugate;
  const double j = det_emi(scn, v, sol);
  CHECK(j == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(j - 0.580458) < 1e-6);

  // Convenience overload runs the same two steps.
  CHECK(det_emi(scn, v) == j);
}

TEST_CASE("solutions re-substitute to within the requested tolerance") {
  const Scenario scn = make_drop(8, 20, 8, RandomStream(21));
  const SpreadingMatrix v = equal_dense(scn);
  const FixedPointSolution sol = solve_fixed_point(scn, v);
  CHECK(ldsnoma::fixed_point_residual(scn, v, sol) < 1e-12);
  CHECK(sol.final_residual < 1e-12);
  CHECK(sol.iterations > 1);
}

TEST_CASE("fixed-point coordinates always live in (0, 1]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario scn = make_drop(6, 15, 6, RandomStream(seed));
    const FixedPointSolution sol = solve_fixed_point(scn, equal_dense(scn));
    CHECK(sol.r.minCoeff() > 0.0);
    CHECK(sol.r.maxCoeff() <= 1.0);
    CHECK(sol.r_tilde.minCoeff() > 0.0);
    CHECK(sol.r_tilde.maxCoeff() <= 1.0);
  }
}

TEST_CASE("damping reaches the same fixed point") {
  const Scenario scn = unit_snr_scenario(5);
  const SpreadingMatrix v = equal_dense(scn);
  const FixedPointSolution plain = solve_fixed_point(scn, v);
  FixedPointOptions opts;
  opts.damping = 0.5;
  const FixedPointSolution damped = solve_fixed_point(scn, v, opts);
  CHECK((plain.r - damped.r).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((plain.r_tilde - damped.r_tilde).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("iteration budget exhaustion carries diagnostics") {
  const Scenario scn = unit_snr_scenario(4);
  const SpreadingMatrix v = equal_dense(scn);
  FixedPointOptions opts;
  opts.max_iter = 1;
  try {
    solve_fixed_point(scn, v, opts);
    FAIL("expected NonConvergenceError");
  } catch (const ldsnoma::NonConvergenceError& e) {
    CHECK(e.iterations() == 1);
    // After one sweep from r~ = 1 the sub-channel factors sit at 1/2, so the
    // recorded residual is the full |1 - 1/2| jump.
    CHECK(e.last_residual() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::string(e.what()).find("sweeps") != std::string::npos);
  }
}

TEST_CASE("option validation rejects nonsensical settings") {
  const Scenario scn = unit_snr_scenario(2);
  const SpreadingMatrix v = equal_dense(scn);
  FixedPointOptions opts;
  opts.tol = 0.0;
  CHECK_THROWS_AS(solve_fixed_point(scn, v, opts), std::invalid_argument);
  opts = {};
  opts.max_iter = 0;
  CHECK_THROWS_AS(solve_fixed_point(scn, v, opts), std::invalid_argument);
  opts = {};
  opts.damping = 1.0;
  CHECK_THROWS_AS(solve_fixed_point(scn, v, opts), std::invalid_argument);
  opts = {};
  opts.damping = -0.1;
  CHECK_THROWS_AS(solve_fixed_point(scn, v, opts), std::invalid_argument);

  // Mismatched fixed point rejected at evaluation time.
  FixedPointSolution bad;
  bad.r = Eigen::VectorXd::Ones(3);
  bad.r_tilde = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(det_emi(scn, v, bad), std::invalid_argument);
}

TEST_CASE("det_emi is invariant under relabeling UEs and sub-channels") {
  const Scenario scn = make_drop(5, 9, 5, RandomStream(17));
  Eigen::MatrixXd vals(5, 9);
  RandomStream rng(18);
  for (int k = 0; k < 9; ++k) {
    double left = scn.ues[k].power_budget;
    for (int f = 0; f < 4; ++f) {
      vals(f, k) = rng.uniform(0.0, left * 0.5);
      left -= vals(f, k);
    }
    vals(4, k) = left;
  }
  const double base = det_emi(scn, SpreadingMatrix(vals));

  const std::vector<int> fperm = {3, 0, 4, 1, 2};
  const std::vector<int> kperm = {8, 2, 5, 0, 7, 1, 4, 6, 3};
  Scenario pscn = scn;
  Eigen::MatrixXd pvals(5, 9);
  for (int k = 0; k < 9; ++k) {
    pscn.ues[k] = scn.ues[kperm[k]];
    for (int f = 0; f < 5; ++f) pvals(f, k) = vals(fperm[f], kperm[k]);
  }
  const double permuted = det_emi(pscn, SpreadingMatrix(pvals));
  CHECK(permuted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("raising the noise floor lowers the deterministic EMI") {
  Scenario scn = make_drop(4, 10, 4, RandomStream(23));
  const SpreadingMatrix v = equal_dense(scn);
  const double base = det_emi(scn, v);
  scn.noise_power *= 10.0;
  CHECK(det_emi(scn, v) < base);
  CHECK(base > 0.0);
}

TEST_CASE("scalar balance equation: golden root, no-load root, residual") {
  // No UEs: the load vanishes and the root is exactly 1.
  CHECK(solve_r_star(7, 1e-12, {}, {}) == 1.0);

  // Unit-SNR symmetric instance reduces to r(2+r) = 1+r.
  const Scenario scn = unit_snr_scenario(6);
  const double r = solve_r_star(scn);
  CHECK(r == doctest::Approx(kGoldenConjugate).epsilon(1e-14));

  // The root re-substitutes to machine precision by construction.
  double load = 0.0;
  for (const auto& ue : scn.ues) {
    const double pa2 = ue.power_budget * ue.pathloss_gain;
    load += pa2 / (scn.noise_power + pa2 * r);
  }
  CHECK(std::abs(r - 1.0 / (1.0 + load / scn.num_subchannels)) < 1e-14);

  // Vanishing load pushes the root toward 1.
  const std::vector<double> tiny_gain = {1e-27};
  const std::vector<double> unit_power = {1.0};
  CHECK(solve_r_star(10, 1e-12, tiny_gain, unit_power) > 1.0 - 1e-3);

  // The bracketing function is increasing on a grid, so bisection is sound.
  const Eigen::VectorXd a2 = scn.pathloss_gains();
  const Eigen::VectorXd p = scn.power_budgets();
  const auto rhs = [&](double x) {
    double acc = 0.0;
    for (int k = 0; k < scn.num_ues(); ++k)
      acc += p[k] * a2[k] / (scn.noise_power + p[k] * a2[k] * x);
    return 1.0 / (1.0 + acc / scn.num_subchannels);
  };
  double prev = rhs(1e-6);
  for (double x = 0.1; x <= 1.0; x += 0.1) {
    const double cur = rhs(x);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("scalar balance equation rejects invalid inputs") {
  CHECK_THROWS_AS(solve_r_star(0, 1e-12, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(solve_r_star(2, 0.0, {}, {}), std::invalid_argument);
  const std::vector<double> one = {1e-9};
  CHECK_THROWS_AS(solve_r_star(2, 1e-12, one, {}), std::invalid_argument);
  CHECK_THROWS_AS(solve_r_star(2, 1e-12, one, one, -1.0), std::invalid_argument);
}

TEST_CASE("equal dense splits certify as optimal on random drops") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario scn = make_drop(10, 30, 10, RandomStream(seed));
    const auto cert = certificate(scn, equal_dense(scn));
    CHECK(cert.max_subchannel_residual() < 1e-9);
    CHECK(cert.max_power_residual() == 0.0);
    CHECK(cert.r_star > 0.0);
    CHECK(cert.r_star <= 1.0);
  }
}

TEST_CASE("certificate pieces satisfy their defining identities") {
  const Scenario scn = unit_snr_scenario(4);
  const auto cert = certificate(scn, equal_dense(scn));
  // With a^2 = sigma^2 and P = 1 both r~* = sigma^2 / (sigma^2 + P a^2 r*)
  // and beta = a^2 / (sigma^2 + P a^2 r*) collapse to 1/(1 + r*) = r*.
  for (int k = 0; k < 4; ++k) {
    CHECK(cert.r_tilde_star[k] ==
          doctest::Approx(kGoldenConjugate).epsilon(1e-13));
    CHECK(cert.beta[k] == doctest::Approx(kGoldenConjugate).epsilon(1e-13));
  }
  // eta_f = sum_k v_{f,k} beta_k and the balance target 1/r* - 1 agree.
  for (int f = 0; f < 4; ++f)
    CHECK(cert.eta[f] ==
          doctest::Approx(1.0 / cert.r_star - 1.0).epsilon(1e-12));
}

TEST_CASE("an empty design is maximally far from full power") {
  const Scenario scn = make_drop(3, 4, 1, RandomStream(2));
  const auto cert = certificate(scn, SpreadingMatrix(Eigen::MatrixXd::Zero(3, 4)));
  for (int k = 0; k < 4; ++k)
    CHECK(cert.power_residuals[k] == -scn.ues[k].power_budget);
  CHECK(cert.max_power_residual() == 1.0);
  // Empty sub-channels sit below the balance target.
  CHECK(cert.subchannel_residuals.maxCoeff() < 0.0);
}

TEST_CASE("two zero-residual designs score the same deterministic EMI") {
  // Symmetric UEs: dense equal split and a balanced 2-sparse round-robin
  // both have flat eta, hence both maximize and must agree.
  Scenario scn;
  scn.num_subchannels = 4;
  scn.noise_power = 1e-12;
  scn.ues.assign(8, ldsnoma::UeRecord{5e-11, 1.0, 2});

  Eigen::MatrixXd rr = Eigen::MatrixXd::Zero(4, 8);
  for (int k = 0; k < 8; ++k) {
    rr((2 * k) % 4, k) = 0.5;
    rr((2 * k + 1) % 4, k) = 0.5;
  }
  const SpreadingMatrix regular(rr);
  Scenario dense_scn = scn;
  for (auto& ue : dense_scn.ues) ue.sparsity = 4;
  const SpreadingMatrix dense = equal_dense(dense_scn);

  CHECK(certificate(scn, regular).max_subchannel_residual() < 1e-9);
  CHECK(certificate(dense_scn, dense).max_subchannel_residual() < 1e-9);
  CHECK(det_emi(scn, regular) ==
        doctest::Approx(det_emi(dense_scn, dense)).epsilon(1e-11));
}

TEST_CASE("equal dense split beats lopsided feasible alternatives") {
  const Scenario scn = make_drop(3, 5, 3, RandomStream(31));
  const double best = det_emi(scn, equal_dense(scn));

  // One-sub-channel concentration.
  Eigen::MatrixXd lump = Eigen::MatrixXd::Zero(3, 5);
  for (int k = 0; k < 5; ++k) lump(k % 3, k) = 1.0;
  CHECK(det_emi(scn, SpreadingMatrix(lump)) < best);

  // Skewed dense split.
  Eigen::MatrixXd skew(3, 5);
  for (int k = 0; k < 5; ++k) {
    skew(0, k) = 0.7;
    skew(1, k) = 0.2;
    skew(2, k) = 0.1;
  }
  CHECK(det_emi(scn, SpreadingMatrix(skew)) < best);
}
