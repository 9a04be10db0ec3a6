#pragma once

#include <Eigen/Core>
#include <span>

#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace ldsnoma {

struct FixedPointOptions {
  double tol = 1e-12;   // absolute tolerance on the max coordinate update
  int max_iter = 10000;  // sweeps before declaring non-convergence
  /// Damping factor in [0, 1): each update is blended with the previous
  /// iterate as (1 - damping) * new + damping * old. The plain alternating
  /// map has been contractive on every tested instance, so the default is
  /// no damping; the knob exists for pathological inputs.
  double damping = 0.0;
};

/// Solution of the coupled fixed-point system behind the deterministic
/// equivalent: for every sub-channel f and UE k,
///   r_f      = 1 / (1 + (1/sigma^2) sum_k v_{f,k} a_k^2 r~_k)
///   r~_k     = 1 / (1 + (a_k^2/sigma^2) sum_f v_{f,k} r_f).
struct FixedPointSolution {
  Eigen::VectorXd r;        // length F
  Eigen::VectorXd r_tilde;  // length K
  int iterations = 0;
  double final_residual = 0.0;
};

/// Iterates the alternating updates from r~ = 1 (the no-interference point,
/// exact for V = 0) until the largest coordinate change drops below tol.
/// Throws NonConvergenceError carrying the last residual if max_iter sweeps
/// do not reach tol.
FixedPointSolution solve_fixed_point(const Scenario& scn, const SpreadingMatrix& v,
                                     const FixedPointOptions& opts = {});

/// Max coordinate change of one extra alternating sweep started at fp;
/// a converged solution re-substitutes to within its tolerance.
double fixed_point_residual(const Scenario& scn, const SpreadingMatrix& v,
                            const FixedPointSolution& fp);

/// Deterministic equivalent of the ergodic mutual information, in nats per
/// sub-channel use:
///   (1/F) [ sum_k log(1 + (a_k^2/s2) sum_f v_{f,k} r_f)
///         + sum_f log(1 + (1/s2) sum_k v_{f,k} a_k^2 r~_k)
///         - (1/s2) sum_{f,k} v_{f,k} a_k^2 r_f r~_k ].
double det_emi(const Scenario& scn, const SpreadingMatrix& v,
               const FixedPointSolution& fp);

/// Convenience overload that solves the fixed point internally.
double det_emi(const Scenario& scn, const SpreadingMatrix& v,
               const FixedPointOptions& opts = {});

/// Root of the scalar balance equation every maximizer of the deterministic
/// EMI satisfies:
///   r* = 1 / (1 + (1/F) sum_k P_k a_k^2 / (sigma^2 + P_k a_k^2 r*)),
/// solved by bisection on (0, 1]. The right-hand side is increasing in r, so
/// g(r) = r - RHS(r) has exactly one sign change. With tol = 0 (the default)
/// the bracket is halved until it collapses to adjacent doubles; a positive
/// tol stops once the bracket width falls below it. No UEs → r* = 1.
double solve_r_star(int num_subchannels, double noise_power,
                    std::span<const double> pathloss_gains,
                    std::span<const double> power_budgets, double tol = 0.0);
double solve_r_star(const Scenario& scn, double tol = 0.0);

/// First-order optimality data for a spreading matrix: the balance weights
/// and the residuals of the two optimality condition families,
///   power:       sum_f v_{f,k} - P_k        (full power per UE)
///   sub-channel: eta_f - (1/r* - 1), eta_f = sum_k beta_k v_{f,k}
/// with beta_k = a_k^2 / (sigma^2 + P_k a_k^2 r*). V maximizes the
/// deterministic EMI iff all residuals vanish.
struct OptimalityCertificate {
  double r_star = 0.0;
  Eigen::VectorXd r_tilde_star;          // length K: sigma^2 scaled UE factors
  Eigen::VectorXd beta;                  // length K
  Eigen::VectorXd eta;                   // length F
  Eigen::VectorXd subchannel_residuals;  // length F
  Eigen::VectorXd power_residuals;       // length K

  double max_subchannel_residual() const;
  double max_power_residual() const;
};

OptimalityCertificate certificate(const Scenario& scn, const SpreadingMatrix& v,
                                  double tol = 0.0);

}  // namespace ldsnoma
