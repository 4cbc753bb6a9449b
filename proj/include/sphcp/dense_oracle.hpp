#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sphcp/chain.hpp"
#include "sphcp/field.hpp"
#include "sphcp/grid.hpp"
#include "sphcp/matern.hpp"

namespace sphcp {

/// Explicit N x (L+1)^2 matrix of sampled harmonics, Psi_ij = psi_{l_j m_j}(s_i).
/// Guarded to K <= 16 unless allow_large is set; meant for tests and the
/// dense benchmark reference.
Eigen::MatrixXd dense_psi(const DHGrid& grid, int L, bool allow_large = false);

/// Explicit N x N isotropic covariance from covariance_series at the pairwise
/// angular separations. Pass L < 0 for the adaptive untruncated series.
/// Evaluation is shared across the unique (row pair, longitude offset)
/// combinations.
Eigen::MatrixXd dense_cov(const MaternSpec& spec, const DHGrid& grid, int L,
                          bool allow_large = false);

/// cos of the angle between grid points (theta_i, phi_j) and (theta_i', phi_j').
double cos_angle(const DHGrid& grid, int i, int j, int ip, int jp);

/// Full-covariance MPM reference sampler: the same Gibbs sweep as Chain but
/// with U and muZ handled through explicit N x N covariance matrices. Used by
/// the runtime benchmark (and cross-checked against the spectral chain at
/// small sizes). L_cov truncates the covariance series evaluation.
class DenseMpmChain {
 public:
  DenseMpmChain(const ModelConfig& cfg, const Eigen::MatrixXd& Y, int L_cov);

  void step();
  int iteration() const { return iteration_; }
  ChangepointState& cp() { return cp_; }
  Eigen::MatrixXd& u_fields() { return U_; }
  double sigma2_eps() const { return sigma2_eps_; }
  double xi() const { return xi_; }
  double sigma2_U() const { return sigma2_U_; }

 private:
  void update_U_dense();
  void update_muZ_dense();
  void update_sigma_eps();
  void update_sigma_U();
  void update_xi();

  ModelConfig cfg_;
  Eigen::MatrixXd Y_;
  DHGrid grid_;
  MeanModel means_;
  ChangepointState cp_;

  Eigen::MatrixXd sigma_U_unit_;      // unit-scale error-process covariance
  Eigen::MatrixXd sigma_U_unit_inv_;
  Eigen::MatrixXd sigma_U_chol_;      // lower factor of sigma_U_unit_
  Eigen::MatrixXd muZ_gain_;          // Sigma_Z (Sigma_Z + I)^{-1}
  Eigen::MatrixXd muZ_cov_chol_;      // lower factor of the posterior covariance

  Eigen::MatrixXd U_;  // N x (M+1)
  double sigma2_eps_ = 1.0;
  double sigma2_U_ = 1.0;
  double xi_ = 0.5;
  int iteration_ = 0;
  double xi_log_step_ = -0.7;
};

}  // namespace sphcp
