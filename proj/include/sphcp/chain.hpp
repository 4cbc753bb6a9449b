#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphcp/changepoint.hpp"
#include "sphcp/dynamics.hpp"
#include "sphcp/error_operator.hpp"
#include "sphcp/grid.hpp"
#include "sphcp/mean_model.hpp"
#include "sphcp/sht.hpp"

namespace sphcp {

struct ModelConfig {
  int K = 8;
  int L = 3;
  int M_time = 4;

  bool use_mpm = true;  // false: spatially independent uniform prior
  MeanModelKind mean_model = MeanModelKind::constant_constant;
  MeanPriors mean_priors;

  // identifiability constants (never sampled)
  double m_Z = 3.0;
  double gamma_cap_offset = 6.0;

  MaternSpec muZ_matern{1.0, 5.0, 1.0};  // spectral prior of the latent mean
  double U_kappa = 5.0;                  // error-process Matern (separable mode)
  double U_nu = 1.0;

  double sigma_eps_prior_shape = 0.01, sigma_eps_prior_scale = 0.01;
  double sigma_U_prior_shape = 0.01, sigma_U_prior_scale = 0.01;

  int iterations = 1000;
  int burn_in = 200;
  int thinning = 1;
  std::uint64_t seed = 1;
  bool archive_fields = false;
  bool coupling = false;

  void validate() const;  // throws config_error
};

struct PosteriorSummary {
  Eigen::VectorXd tau_mean;
  Eigen::VectorXi tau_mode;
  Eigen::VectorXd tau_mode_prob;
  Eigen::VectorXi changepoint_flag;  // 1 unless the mode equals M_time
  std::vector<double> sigma2_eps_trace, sigma2_U_trace, xi_trace, mu1_trace,
      mu2_trace;
  double waic = 0.0;
  int n_samples = 0;
};

/// Streaming WAIC: accumulates per-observation log-likelihood vectors, one
/// per posterior sample, with log-sum-exp for the lppd term and Welford
/// variance for the effective-parameter term.
class WaicAccumulator {
 public:
  void add_sample(const Eigen::VectorXd& loglik);
  double value() const;  // throws with fewer than 2 samples
  int n_samples() const { return n_; }

 private:
  int n_ = 0;
  Eigen::VectorXd max_, sumexp_, mean_, m2_;
};

/// WAIC = -2(lppd - p_waic) from a samples x observations log-likelihood
/// matrix.
double waic(const Eigen::MatrixXd& loglik);

/// All-Gibbs sampler for the changepoint model. Holds the immutable grid,
/// transform plan and error operator plus the mutable chain state; every
/// random draw is keyed by (seed, variable tag, iteration, index), making the
/// run a pure function of (config, data, seed).
class Chain {
 public:
  Chain(const ModelConfig& cfg, const Eigen::MatrixXd& Y);

  /// One full sweep: U, tau, (Z, gamma, muZ when MPM), means, sigma2_eps,
  /// sigma2_U, xi.
  void step();

  PosteriorSummary run(const std::string& archive_dir = "");

  const ModelConfig& config() const { return cfg_; }
  const DHGrid& grid() const { return grid_; }
  const ShtPlan& plan() const { return plan_; }
  const ErrorOperator& error_op() const { return E_; }

  int iteration() const { return iteration_; }
  ChangepointState& cp() { return cp_; }
  DynamicsState& dynamics() { return dyn_; }
  MeanModel& means() { return means_; }
  Eigen::MatrixXd& u_fields() { return U_; }
  double sigma2_eps() const { return sigma2_eps_; }
  double sigma2_U() const { return dyn_.params.matern.sigma2; }
  double xi() const { return dyn_.params.xi(); }
  double xi_accept_rate() const {
    return xi_tries_ ? static_cast<double>(xi_accepts_) / xi_tries_ : 0.0;
  }

  void set_sigma2_eps(double v) { sigma2_eps_ = v; }
  void set_xi(double v);
  void set_sigma2_U(double v) { dyn_.params.matern.sigma2 = v; }

  /// Per-observation log-likelihood at the current state (for WAIC).
  Eigen::VectorXd observation_loglik() const;

 private:
  void update_sigma_eps();
  void update_sigma_U();
  void update_xi();
  Eigen::MatrixXd residual_minus_mean() const;  // Y - mu_t(tau) (N x M)

  ModelConfig cfg_;
  Eigen::MatrixXd Y_;  // N x M
  DHGrid grid_;
  ShtPlan plan_;
  ErrorOperator E_;
  Eigen::VectorXd d_alpha_;  // muZ spectral prior variances per coefficient
  Eigen::VectorXd s_U_;      // unit-scale spectral variances for U per coefficient

  ChangepointState cp_;
  DynamicsState dyn_;
  MeanModel means_;
  Eigen::MatrixXd U_;  // N x (M_time + 1) fields
  double sigma2_eps_ = 1.0;
  int iteration_ = 0;

  // logit random-walk adaptation for xi (frozen after burn-in)
  double xi_log_step_ = -0.7;
  long xi_accepts_ = 0, xi_tries_ = 0;
};

/// Coupled chains across truncation degrees: identical initialization and
/// shared random streams, IND changepoint prior. Returns g-RMSE of the
/// posterior-mean changepoint per level.
struct CoupledResult {
  std::vector<int> levels;
  std::vector<double> g_rmse;
};

CoupledResult run_coupled(const ModelConfig& base, const Eigen::MatrixXd& Y,
                          const Eigen::VectorXd& tau_truth,
                          const std::vector<int>& levels);

/// Recomputes the tau part of a summary from an on-disk sample archive.
PosteriorSummary summarize_archive(const std::string& dir);

}  // namespace sphcp
