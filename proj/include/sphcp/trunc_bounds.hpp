#pragma once

#include <Eigen/Core>

#include "sphcp/matern.hpp"

namespace sphcp {

/// Inputs for the truncation agreement bounds: number of time categories M,
/// thresholds gamma_1..gamma_{M-1} (gamma_0 = -inf, gamma_M = +inf implied),
/// the latent-mean variance vZ of the truncated field, the spectral scale
/// sigmaZ, truncation degree L, and smoothness nu. kappa enters only through
/// the vZ <-> sigmaZ reconciliation.
struct TruncBoundInput {
  int M = 2;
  Eigen::VectorXd gammas;
  double vZ = 1.0;
  double sigmaZ = 1.0;
  int L = 1;
  double nu = 1.0;
  double kappa = 1.0;
};

/// sigma_Z^2 such that vZ = sigma_Z^2 * sum_{l<=L} (2l+1)(kappa^2+l(l+1))^{-(nu+1)}.
double sigma_z_from_vz(double vZ, double kappa, double nu, int L);

/// Same reconciliation under the literal reading of the exponent as -nu+1;
/// kept only for the diagnostic path of the Table reproduction.
double sigma_z_from_vz_literal(double vZ, double kappa, double nu, int L);

/// Equal-probability thresholds gamma_k = sqrt(vZ+1) * Phi^{-1}(k/M).
Eigen::VectorXd thresholds_equal_prob(int M, double vZ);

/// Equal-distance thresholds gamma_k = -B + k(2B/M); B is estimated as the
/// average over replicates of max_s |Z^L(s)| with Z^L simulated on a K x 2K
/// grid (a documented reading of "averaging the spread").
Eigen::VectorXd thresholds_equal_dist(int M, double vZ, double kappa, double nu,
                                      int L, int K_sim, int n_reps,
                                      std::uint64_t seed);

/// Builds the input with sigmaZ reconciled from vZ.
TruncBoundInput make_trunc_bound_input(int M, const Eigen::VectorXd& gammas,
                                       double vZ, double kappa, double nu, int L);

/// Lower bound on P(|tau^L - tau| <= a), a in 0..M-1. The conditional
/// expectations are evaluated by adaptive quadrature over the truncated
/// normal density of Z^L ~ N(0, vZ+1).
double cp_agreement_bound(const TruncBoundInput& in, int a);

/// Worst-case expected MAE: (M-1) - sum_a cp_agreement_bound(in, a),
/// clamped to [0, M-1].
double expected_mae_bound(const TruncBoundInput& in);

}  // namespace sphcp
