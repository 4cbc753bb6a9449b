#pragma once

#include <Eigen/Core>

#include "sphcp/rng.hpp"

namespace sphcp {

enum class MeanModelKind { constant_constant, constant_linear };

/// Gaussian priors on the mean coefficients. For the constant-constant model
/// mu1/mu2 are global scalars; for the constant-linear model mu1 plays beta0
/// and (beta1, beta2) are per-location level and trend after the changepoint,
/// with the variances acting as ridge penalties.
struct MeanPriors {
  double mu1_mean = 0.0, mu1_var = 100.0;
  double mu2_mean = 0.0, mu2_var = 100.0;
  double beta1_mean = 0.0, beta1_var = 100.0;
  double beta2_mean = 0.0, beta2_var = 100.0;
};

/// Current mean-coefficient values plus the segment likelihood evaluations
/// the tau update needs.
class MeanModel {
 public:
  MeanModel(MeanModelKind kind, const MeanPriors& priors, int n_loc, int M);

  MeanModelKind kind() const { return kind_; }
  int M() const { return M_; }

  /// Mean value at (location, time t in 1..M) given changepoint k.
  double mean(int loc, int t, int k) const;

  /// Fills loglik[k-1], k = 1..M, with the Gaussian log-likelihood of the
  /// residual series r_t = Y(loc,t) - U(loc,t) under changepoint k (additive
  /// constants in k dropped).
  void segment_loglik(int loc, const Eigen::RowVectorXd& resid, double sigma2_eps,
                      Eigen::VectorXd& loglik) const;

  /// Conjugate Gaussian draws of all mean coefficients given tau and the
  /// residuals Y - U. Locations with tau = M contribute no post-change data,
  /// so their (beta1, beta2) revert to prior draws.
  void update(const Eigen::MatrixXd& resid, const Eigen::VectorXi& tau,
              double sigma2_eps, std::uint64_t seed, std::uint32_t iteration);

  double mu1() const { return mu1_; }
  double mu2() const { return mu2_; }
  const Eigen::VectorXd& beta1() const { return beta1_; }
  const Eigen::VectorXd& beta2() const { return beta2_; }

  void set_mu1(double v) { mu1_ = v; }
  void set_mu2(double v) { mu2_ = v; }
  void set_beta(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2);

 private:
  MeanModelKind kind_;
  MeanPriors priors_;
  int M_;
  double mu1_ = 0.0;  // beta0 in the constant-linear model
  double mu2_ = 0.0;
  Eigen::VectorXd beta1_, beta2_;
};

}  // namespace sphcp
