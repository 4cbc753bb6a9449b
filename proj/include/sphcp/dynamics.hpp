#pragma once

#include <Eigen/Core>

#include "sphcp/error_operator.hpp"
#include "sphcp/field.hpp"
#include "sphcp/matern.hpp"
#include "sphcp/rng.hpp"
#include "sphcp/sht.hpp"

namespace sphcp {

enum class DynamicsMode { separable, nonseparable };

/// Spectral reaction-diffusion dynamics. The per-degree OU rate is
/// xi_r + xi_d * l(l+1); separable mode is exactly xi_d = 0 with AR
/// coefficient xi = exp(-xi_r) shared by all degrees and innovation
/// covariance sigma2_U * D_alpha (matern.sigma2 plays sigma2_U there,
/// sigma_Q^2 in nonseparable mode).
struct DynamicsParams {
  DynamicsMode mode = DynamicsMode::separable;
  double xi_r = 0.5;
  double xi_d = 0.0;
  MaternSpec matern;

  static DynamicsParams separable(double xi, double sigma2_U, double kappa, double nu);
  static DynamicsParams nonseparable(double xi_r, double xi_d, double sigma_Q2,
                                     double kappa, double nu);

  double xi() const;       // separable AR coefficient exp(-xi_r)
  double rate(int l) const { return xi_r + xi_d * static_cast<double>(l) * (l + 1); }
  void validate() const;   // rate must be positive at every degree
};

/// Spectral coefficients of the error process for t = 0..M_time (t = 0 is the
/// latent initial state), one column per time.
struct DynamicsState {
  int L = 0;
  int M_time = 0;
  DynamicsParams params;
  Eigen::MatrixXd Uhat;  // (L+1)^2 x (M_time + 1)
};

/// AR(1) coefficient exp(-(xi_r + xi_d l(l+1))) for degree l.
double ar1_coeff(const DynamicsParams& p, int l);

/// Innovation variance of the degree-l channels.
double innovation_var(const DynamicsParams& p, int l);

/// Stationary channel variance innovation_var / (1 - ar1_coeff^2).
double stationary_var(const DynamicsParams& p, int l);

/// Simulates all channels from the stationary initial state forward.
DynamicsState sample_prior_path(const DynamicsParams& p, int L, int M_time,
                                std::uint64_t seed, std::uint32_t replicate);

/// One forward Gibbs sweep over t = 0..M of the spectral coefficients given
/// the data-minus-mean fields (columns t = 1..M). Each conditional is the
/// exact Gaussian using the parity-block structure of E; fields in u_fields
/// (columns 0..M) are refreshed from the new coefficients. One standard
/// normal per (t, coefficient), stream (seed, kU, iteration*(M+1)+t, coeff).
void update_U(DynamicsState& dyn, const Eigen::MatrixXd& data_minus_mean,
              double sigma2_eps, const ErrorOperator& E, const ShtPlan& plan,
              Eigen::MatrixXd& u_fields, std::uint64_t seed,
              std::uint32_t iteration);

/// Space-time cross covariance at angular separation u (cos given) and lag
/// h >= 0, truncated at degree L:
/// (sigma_Q^2/4pi) sum_l (2l+1) P_l(cos u) (kappa^2+l(l+1))^{-(nu+1)}
///                 exp(-rate_l h) / rate_l.
double cross_cov(const DynamicsParams& p, double cos_u, double h, int L);

/// Non-separability measure: max over the supplied grids of
/// |rho_st(u,h) - rho_s(u) rho_t(h)| (grid maximum, a lower bound of the
/// true sup). u_grid in radians, h_grid >= 0.
double csep(const DynamicsParams& p, const Eigen::VectorXd& u_grid,
            const Eigen::VectorXd& h_grid, int L);

}  // namespace sphcp
