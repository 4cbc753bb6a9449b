#pragma once

#include <Eigen/Core>

namespace sphcp {

/// Whittle-Matern SPDE parameters on the sphere. The angular power spectrum
/// is S_l = sigma2 * (kappa^2 + l(l+1))^{-(nu+1)}.
struct MaternSpec {
  double sigma2 = 1.0;
  double kappa = 1.0;
  double nu = 1.0;
};

/// S_l for degree l >= 0.
double spectral_density(const MaternSpec& spec, int l);

/// Vector of S_l for l = 0..L.
Eigen::VectorXd spectral_density_vector(const MaternSpec& spec, int L);

/// Isotropic covariance at angular separation u with cos(u) given:
/// (sigma2/4pi) sum_l (2l+1)(kappa^2+l(l+1))^{-(nu+1)} P_l(cos u), truncated
/// at degree L. Pass L < 0 for the adaptive untruncated sum (tail bound is
/// driven below 1e-12; throws numerical_error past 10^6 terms).
double covariance_series(const MaternSpec& spec, double cos_u, int L);

/// Upper bound on the spectral tail sum_{l>L} (2l+1) S_l:
/// sigma2 * (1/nu + 1/(L(2nu+1))) * L^{-2nu}. Requires nu > 1/2, L >= 1.
double trunc_tail_bound(const MaternSpec& spec, int L);

/// covariance_series evaluated at many separations at once, sharing the
/// Legendre recurrence across points (used to assemble dense covariances).
Eigen::VectorXd covariance_series_batch(const MaternSpec& spec,
                                        const Eigen::VectorXd& cos_u, int L);

}  // namespace sphcp
