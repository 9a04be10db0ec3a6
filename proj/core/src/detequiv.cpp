#include "ldsnoma/detequiv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ldsnoma/errors.hpp"
#include "ldsnoma/textio.hpp"

namespace ldsnoma {
namespace {

// v_{f,k} a_k^2, the weight matrix both fixed-point updates share.
Eigen::MatrixXd weighted_values(const Scenario& scn, const SpreadingMatrix& v) {
  return v.values().array().rowwise() *
         scn.pathloss_gains().transpose().array();
}

}  // namespace

FixedPointSolution solve_fixed_point(const Scenario& scn, const SpreadingMatrix& v,
                                     const FixedPointOptions& opts) {
  scn.validate();
  check_conforms(scn, v);
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("solve_fixed_point: tol must be positive");
  if (opts.max_iter < 1)
    throw std::invalid_argument("solve_fixed_point: max_iter must be >= 1");
  if (opts.damping < 0.0 || opts.damping >= 1.0)
    throw std::invalid_argument("solve_fixed_point: damping must be in [0, 1)");

  const Eigen::MatrixXd va = weighted_values(scn, v);
  const double inv_s2 = 1.0 / scn.noise_power;
  const double lambda = opts.damping;

  Eigen::VectorXd r = Eigen::VectorXd::Ones(scn.num_subchannels);
  Eigen::VectorXd rt = Eigen::VectorXd::Ones(scn.num_ues());
  double residual = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd r_new =
        (1.0 + inv_s2 * (va * rt).array()).inverse().matrix();
    if (lambda > 0.0) r_new = (1.0 - lambda) * r_new + lambda * r;
    Eigen::VectorXd rt_new =
        (1.0 + inv_s2 * (va.transpose() * r_new).array()).inverse().matrix();
    if (lambda > 0.0) rt_new = (1.0 - lambda) * rt_new + lambda * rt;

    residual = std::max((r_new - r).cwiseAbs().maxCoeff(),
                        (rt_new - rt).cwiseAbs().maxCoeff());
    r.swap(r_new);
    rt.swap(rt_new);
    if (residual < opts.tol) return {std::move(r), std::move(rt), it, residual};
  }
  throw NonConvergenceError(
      "fixed point not converged after " + std::to_string(opts.max_iter) +
          " sweeps; last residual " + format_double(residual, 6) +
          " vs tol " + format_double(opts.tol, 6),
      opts.max_iter, residual);
}

double fixed_point_residual(const Scenario& scn, const SpreadingMatrix& v,
                            const FixedPointSolution& fp) {
  const Eigen::MatrixXd va = weighted_values(scn, v);
  const double inv_s2 = 1.0 / scn.noise_power;
  const Eigen::VectorXd r_new =
      (1.0 + inv_s2 * (va * fp.r_tilde).array()).inverse().matrix();
  const Eigen::VectorXd rt_new =
      (1.0 + inv_s2 * (va.transpose() * r_new).array()).inverse().matrix();
  return std::max((r_new - fp.r).cwiseAbs().maxCoeff(),
                  (rt_new - fp.r_tilde).cwiseAbs().maxCoeff());
}

double det_emi(const Scenario& scn, const SpreadingMatrix& v,
               const FixedPointSolution& fp) {
  if (fp.r.size() != scn.num_subchannels || fp.r_tilde.size() != scn.num_ues())
    throw std::invalid_argument("det_emi: fixed point does not match scenario");
  const Eigen::MatrixXd va = weighted_values(scn, v);
  const double inv_s2 = 1.0 / scn.noise_power;
  const Eigen::VectorXd a2 = scn.pathloss_gains();

  // sum_f v_{f,k} r_f per UE and sum_k v_{f,k} a_k^2 r~_k per sub-channel.
  const Eigen::VectorXd ue_load = v.values().transpose() * fp.r;
  const Eigen::VectorXd sub_load = va * fp.r_tilde;

  double ue_terms = 0.0;
  for (int k = 0; k < scn.num_ues(); ++k)
    ue_terms += std::log1p(inv_s2 * a2[k] * ue_load[k]);
  double sub_terms = 0.0;
  for (int f = 0; f < scn.num_subchannels; ++f)
    sub_terms += std::log1p(inv_s2 * sub_load[f]);
  const double cross = inv_s2 * fp.r.dot(sub_load);

  return (ue_terms + sub_terms - cross) / scn.num_subchannels;
}

double det_emi(const Scenario& scn, const SpreadingMatrix& v,
               const FixedPointOptions& opts) {
  return det_emi(scn, v, solve_fixed_point(scn, v, opts));
}

double solve_r_star(int num_subchannels, double noise_power,
                    std::span<const double> pathloss_gains,
                    std::span<const double> power_budgets, double tol) {
  if (num_subchannels < 1)
    throw std::invalid_argument("solve_r_star: need at least one sub-channel");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("solve_r_star: noise power must be positive");
  if (pathloss_gains.size() != power_budgets.size())
    throw std::invalid_argument("solve_r_star: gain/power length mismatch");
  if (tol < 0.0) throw std::invalid_argument("solve_r_star: tol must be >= 0");

  const auto g = [&](double r) {
    double load = 0.0;
    for (std::size_t k = 0; k < pathloss_gains.size(); ++k) {
      const double pa2 = power_budgets[k] * pathloss_gains[k];
      load += pa2 / (noise_power + pa2 * r);
    }
    return r - 1.0 / (1.0 + load / num_subchannels);
  };

  // g(0) = -RHS(0) < 0 and g(1) >= 0 always, so (0, 1] brackets the root.
  // With no UEs the load vanishes and the root sits exactly at 1.
  if (g(1.0) <= 0.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 1200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket collapsed to adjacent doubles
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= tol) break;
  }
  return hi;
}

double solve_r_star(const Scenario& scn, double tol) {
  scn.validate();
  const Eigen::VectorXd a2 = scn.pathloss_gains();
  const Eigen::VectorXd p = scn.power_budgets();
  return solve_r_star(scn.num_subchannels, scn.noise_power,
                      std::span<const double>(a2.data(), a2.size()),
                      std::span<const double>(p.data(), p.size()), tol);
}

double OptimalityCertificate::max_subchannel_residual() const {
  return subchannel_residuals.size() == 0
             ? 0.0
             : subchannel_residuals.cwiseAbs().maxCoeff();
}

double OptimalityCertificate::max_power_residual() const {
  return power_residuals.size() == 0 ? 0.0
                                     : power_residuals.cwiseAbs().maxCoeff();
}

OptimalityCertificate certificate(const Scenario& scn, const SpreadingMatrix& v,
                                  double tol) {
  scn.validate();
  check_conforms(scn, v);
  const int num_k = scn.num_ues();

  OptimalityCertificate cert;
  cert.r_star = solve_r_star(scn, tol);
  cert.r_tilde_star.resize(num_k);
  cert.beta.resize(num_k);
  for (int k = 0; k < num_k; ++k) {
    const double pa2r =
        scn.ues[k].power_budget * scn.ues[k].pathloss_gain * cert.r_star;
    cert.r_tilde_star[k] = scn.noise_power / (scn.noise_power + pa2r);
    cert.beta[k] = scn.ues[k].pathloss_gain / (scn.noise_power + pa2r);
  }

  // Balance target: every sub-channel's weighted load should equal 1/r* - 1.
  const double target = 1.0 / cert.r_star - 1.0;
  cert.eta = v.values() * cert.beta;
  cert.subchannel_residuals = cert.eta.array() - target;

  cert.power_residuals.resize(num_k);
  for (int k = 0; k < num_k; ++k)
    cert.power_residuals[k] = v.column_power(k) - scn.ues[k].power_budget;
  return cert;
}

}  // namespace ldsnoma
