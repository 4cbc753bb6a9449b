#include "sphcp/matern.hpp"

#include <cmath>
#include <stdexcept>

#include "sphcp/errors.hpp"
#include "sphcp/stats.hpp"

namespace sphcp {

double spectral_density(const MaternSpec& spec, int l) {
  if (l < 0) throw std::invalid_argument("spectral_density: l must be >= 0");
  const double lam = spec.kappa * spec.kappa + static_cast<double>(l) * (l + 1);
  return spec.sigma2 * std::pow(lam, -(spec.nu + 1.0));
}

Eigen::VectorXd spectral_density_vector(const MaternSpec& spec, int L) {
  Eigen::VectorXd s(L + 1);
  for (int l = 0; l <= L; ++l) s[l] = spectral_density(spec, l);
  return s;
}

double covariance_series(const MaternSpec& spec, double cos_u, int L) {
  if (std::abs(cos_u) > 1.0) {
    throw std::invalid_argument("covariance_series: |cos_u| must be <= 1");
  }
  const double x = cos_u;
  double sum = 0.0;
  double pl = 1.0, plm1 = 0.0;  // P_0, P_{-1}
  const long max_terms = (L >= 0) ? L : 1000000L;
  for (long l = 0;; ++l) {
    sum += (2.0 * l + 1.0) * spectral_density(spec, static_cast<int>(l)) * pl;
    if (L >= 0 && l == L) break;
    if (L < 0 && l >= 1) {
      // |P_l| <= 1, so the remaining tail is below the spectral tail bound
      if (trunc_tail_bound(spec, static_cast<int>(l)) < 1e-12 * 4.0 * kPi) break;
      if (l >= max_terms) {
        throw numerical_error("covariance_series: tail bound did not reach tolerance");
      }
    }
    const double plp1 = ((2.0 * l + 1.0) * x * pl - l * plm1) / (l + 1.0);
    plm1 = pl;
    pl = plp1;
  }
  return sum / (4.0 * kPi);
}

Eigen::VectorXd covariance_series_batch(const MaternSpec& spec,
                                        const Eigen::VectorXd& cos_u, int L) {
  const Eigen::Index n = cos_u.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pl = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd plm1 = Eigen::VectorXd::Zero(n);
  for (int l = 0; l <= L; ++l) {
    sum += (2.0 * l + 1.0) * spectral_density(spec, l) * pl;
    if (l == L) break;
    Eigen::VectorXd plp1 =
        ((2.0 * l + 1.0) * cos_u.array() * pl.array() - l * plm1.array()).matrix() /
        (l + 1.0);
    plm1.swap(pl);
    pl.swap(plp1);
  }
  return sum / (4.0 * kPi);
}

double trunc_tail_bound(const MaternSpec& spec, int L) {
  if (!(spec.nu > 0.5)) {
    throw std::invalid_argument("trunc_tail_bound: requires nu > 1/2");
  }
  if (L < 1) throw std::invalid_argument("trunc_tail_bound: requires L >= 1");
  const double nu = spec.nu;
  return spec.sigma2 * (1.0 / nu + 1.0 / (L * (2.0 * nu + 1.0))) *
         std::pow(static_cast<double>(L), -2.0 * nu);
}

}  // namespace sphcp
