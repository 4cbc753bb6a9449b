#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sphcp/dynamics.hpp"
#include "sphcp/field.hpp"
#include "sphcp/grid.hpp"
#include "sphcp/matern.hpp"

namespace sphcp {

enum class CpGenerator { minmax, cdf };

/// Synthetic-data configuration: a Matern auxiliary field drives the
/// changepoints onto the support {6..55}, the error process is a separable
/// spectral AR(1), and iid Gaussian noise is added on top of a constant
/// pre-change mean and a constant post-change shift delta.
struct SimConfig {
  int K = 20;
  int M_time = 60;
  CpGenerator generator = CpGenerator::minmax;
  double tau_kappa = 5.0;
  double tau_nu = 1.0;
  double mu1 = 0.0;
  double delta = 1.5;
  MaternSpec U_matern{1.0, 5.0, 1.0};  // sigma2 plays sigma2_U
  double xi = 0.7;
  double sigma2_eps = 0.25;
  int n_replicates = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimDataset {
  Eigen::MatrixXd Y;    // N x M_time
  Eigen::VectorXi tau;  // true changepoints
  double mu1 = 0.0;
  double mu2 = 0.0;  // mu1 + delta
};

/// Min-max scaling of the auxiliary field onto {6..55}; the minimizer maps to
/// 6. Throws on a constant field.
Eigen::VectorXi gen_changepoints_minmax(const ScalarField& tau_tilde);

/// Gaussian-CDF transform floor(Phi(tau_tilde / marginal_sd) * 50 + 6),
/// clamped into {6..55}; approximately uniform when the field is standardized
/// by its model marginal sd.
Eigen::VectorXi gen_changepoints_cdf(const ScalarField& tau_tilde, double marginal_sd);

/// Generates one replicate: Y(s,t) = mu1 + delta*1{t > tau(s)} + U(s,t) + eps.
SimDataset gen_dataset(const SimConfig& cfg, int replicate);

/// Surface-integral RMSE sqrt((1/4pi) sum_i w(s_i) (truth_i - estimate_i)^2).
double g_rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate,
              const DHGrid& grid);

/// Least-squares fit of y = a*exp(-b*L) + c over (L, y) points: golden-section
/// search over b >= 0 with (a, c) profiled linearly.
struct ExpDecayFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double resid_norm = 0.0;
};

ExpDecayFit fit_exp_decay(const std::vector<std::pair<double, double>>& points);

}  // namespace sphcp
