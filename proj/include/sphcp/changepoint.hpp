#pragma once

#include <Eigen/Core>

#include "sphcp/error_operator.hpp"
#include "sphcp/field.hpp"
#include "sphcp/mean_model.hpp"
#include "sphcp/rng.hpp"
#include "sphcp/sht.hpp"

namespace sphcp {

/// Latent state of the multinomial-probit changepoint prior. gamma_1 is fixed
/// at 0; gamma_0 = -inf and gamma_M = +inf are implied; the configured cap
/// acts as the finite prior anchor for the top threshold's uniform draw.
struct ChangepointState {
  int M = 2;                 // number of time categories
  Eigen::VectorXi tau;       // per location, values in 1..M
  Eigen::VectorXd Z;         // latent Gaussians
  Eigen::VectorXd gammas;    // M-1 thresholds, gammas[0] == 0
  SpectralCoeffs alpha;      // coefficients of muZ - mZ
  ScalarField muZ_field;     // mZ + Psi alpha
  double mZ = 3.0;
  double gamma_cap = 9.0;    // prior anchor for gamma_{M-1}

  double gamma_at(int idx) const;  // idx in 0..M, with the infinite ends
  void check_consistent() const;   // throws if (tau, Z, gammas) disagree
};

/// log(Phi(b) - Phi(a)) for a < b, stable in both tails.
double log_norm_cdf_diff(double a, double b);

/// Draws tau at every location from the categorical full conditional:
/// likelihood of the two-segment mean model times the probit bin
/// probabilities. resid holds Y - U (N x M). One uniform per location,
/// stream (seed, kTau, iteration, location).
void update_tau(const Eigen::MatrixXd& resid, const MeanModel& mean,
                double sigma2_eps, ChangepointState& st, std::uint64_t seed,
                std::uint32_t iteration);

/// Same update under the spatially independent uniform prior pi_k = 1/M.
void ind_update_tau(const Eigen::MatrixXd& resid, const MeanModel& mean,
                    double sigma2_eps, int M, Eigen::VectorXi& tau,
                    std::uint64_t seed, std::uint32_t iteration);

/// Z(s) | tau(s)=k ~ TN(muZ(s), 1, gamma_{k-1}, gamma_k), independent across
/// locations; stream (seed, kZ, iteration, location).
void update_Z(ChangepointState& st, std::uint64_t seed, std::uint32_t iteration);

/// gamma_k ~ Unif over the interval pinched by the Z values in categories k
/// and k+1, for k = 2..M-1 (gamma_1 stays 0). Aborts if the interval is
/// empty, which the consistency invariant rules out.
void update_gamma(ChangepointState& st, std::uint64_t seed, std::uint32_t iteration);

/// alpha | . ~ N((E^{-1}+D_a^{-1})^{-1} E^{-1} Psi^T D_w (Z - mZ),
///              (E^{-1}+D_a^{-1})^{-1}), drawn exactly via the parity
/// blocks; refreshes muZ_field. d_alpha holds the spectral prior variances
/// per canonical coefficient. One standard normal per coefficient, stream
/// (seed, kAlpha, iteration, coefficient).
void update_muZ(ChangepointState& st, const ErrorOperator& E,
                const Eigen::VectorXd& d_alpha, const ShtPlan& plan,
                std::uint64_t seed, std::uint32_t iteration);

/// Draws x ~ N(B^{-1} a, B^{-1}) with B = c * E_b^{-1} + diag(d) per block;
/// z supplies one standard normal per canonical coefficient index.
SpectralCoeffs sample_block_precision(const ErrorOperator& E, double c,
                                      const Eigen::VectorXd& d,
                                      const SpectralCoeffs& a,
                                      const Eigen::VectorXd& z);

}  // namespace sphcp
