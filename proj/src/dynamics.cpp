#include "sphcp/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "sphcp/changepoint.hpp"
#include "sphcp/errors.hpp"
#include "sphcp/legendre.hpp"
#include "sphcp/stats.hpp"

namespace sphcp {

DynamicsParams DynamicsParams::separable(double xi, double sigma2_U, double kappa,
                                         double nu) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::invalid_argument("DynamicsParams: separable xi must be in (0,1)");
  }
  DynamicsParams p;
  p.mode = DynamicsMode::separable;
  p.xi_r = -std::log(xi);
  p.xi_d = 0.0;
  p.matern = MaternSpec{sigma2_U, kappa, nu};
  return p;
}

DynamicsParams DynamicsParams::nonseparable(double xi_r, double xi_d, double sigma_Q2,
                                            double kappa, double nu) {
  DynamicsParams p;
  p.mode = DynamicsMode::nonseparable;
  p.xi_r = xi_r;
  p.xi_d = xi_d;
  p.matern = MaternSpec{sigma_Q2, kappa, nu};
  p.validate();
  return p;
}

double DynamicsParams::xi() const { return std::exp(-xi_r); }

void DynamicsParams::validate() const {
  // the l = 0 channel has rate xi_r, so a positive reaction term is required
  if (!(xi_r > 0.0) || xi_d < 0.0) {
    throw std::invalid_argument("DynamicsParams: need xi_r > 0 and xi_d >= 0");
  }
}

double ar1_coeff(const DynamicsParams& p, int l) { return std::exp(-p.rate(l)); }

double innovation_var(const DynamicsParams& p, int l) {
  if (p.mode == DynamicsMode::separable) {
    return spectral_density(p.matern, l);  // sigma2_U * S_l
  }
  const double r = p.rate(l);
  return spectral_density(p.matern, l) * (1.0 - std::exp(-2.0 * r)) / (2.0 * r);
}

double stationary_var(const DynamicsParams& p, int l) {
  const double xi = ar1_coeff(p, l);
  return innovation_var(p, l) / (1.0 - xi * xi);
}

DynamicsState sample_prior_path(const DynamicsParams& p, int L, int M_time,
                                std::uint64_t seed, std::uint32_t replicate) {
  p.validate();
  DynamicsState st;
  st.L = L;
  st.M_time = M_time;
  st.params = p;
  const int ncoef = SpectralCoeffs::size_for(L);
  st.Uhat.resize(ncoef, M_time + 1);
  for (int l = 0; l <= L; ++l) {
    const double xi = ar1_coeff(p, l);
    const double sd_inn = std::sqrt(innovation_var(p, l));
    const double sd_stat = (sd_inn == 0.0) ? 0.0 : std::sqrt(stationary_var(p, l));
    for (int m = -l; m <= l; ++m) {
      const int idx = SpectralCoeffs::index(l, m);
      RngStream rs(seed, rngtag::kSim, replicate, static_cast<std::uint32_t>(idx));
      st.Uhat(idx, 0) = sd_stat * rs.normal();
      for (int t = 1; t <= M_time; ++t) {
        st.Uhat(idx, t) = xi * st.Uhat(idx, t - 1) + sd_inn * rs.normal();
      }
    }
  }
  return st;
}

namespace {
// per-coefficient AR coefficient and innovation variance vectors
void channel_vectors(const DynamicsParams& p, int L, Eigen::VectorXd& xi,
                     Eigen::VectorXd& eta) {
  const int ncoef = SpectralCoeffs::size_for(L);
  xi.resize(ncoef);
  eta.resize(ncoef);
  for (int l = 0; l <= L; ++l) {
    const double x = ar1_coeff(p, l);
    const double e = innovation_var(p, l);
    for (int m = -l; m <= l; ++m) {
      const int idx = SpectralCoeffs::index(l, m);
      xi[idx] = x;
      eta[idx] = e;
    }
  }
}
}  // namespace

void update_U(DynamicsState& dyn, const Eigen::MatrixXd& data_minus_mean,
              double sigma2_eps, const ErrorOperator& E, const ShtPlan& plan,
              Eigen::MatrixXd& u_fields, std::uint64_t seed,
              std::uint32_t iteration) {
  const int L = dyn.L;
  const int M = dyn.M_time;
  const int ncoef = SpectralCoeffs::size_for(L);
  require(E.L() == L && plan.L() == L, "update_U: degree mismatch");
  require(data_minus_mean.cols() == M, "update_U: time dimension mismatch");
  require(sigma2_eps > 0.0, "update_U: sigma2_eps must be positive");

  Eigen::VectorXd xi, eta;
  channel_vectors(dyn.params, L, xi, eta);
  const double inv_s2 = 1.0 / sigma2_eps;

  ScalarField work(plan.K());
  for (int t = 0; t <= M; ++t) {
    Eigen::VectorXd z(ncoef);
    const std::uint32_t it_key = iteration * static_cast<std::uint32_t>(M + 1) +
                                 static_cast<std::uint32_t>(t);
    for (int idx = 0; idx < ncoef; ++idx) {
      RngStream rs(seed, rngtag::kU, it_key, static_cast<std::uint32_t>(idx));
      z[idx] = rs.normal();
    }

    if (t == 0) {
      // latent initial state: beta_0 | beta_1 ~ N(xi o beta_1, D_eta)
      dyn.Uhat.col(0) =
          (xi.array() * dyn.Uhat.col(1).array() + eta.array().sqrt() * z.array())
              .matrix();
    } else {
      work.values = data_minus_mean.col(t - 1);
      const SpectralCoeffs fwd = plan.forward(work);
      SpectralCoeffs rhs = E.solve(fwd);
      rhs.values *= inv_s2;

      Eigen::VectorXd d(ncoef);
      if (t < M) {
        rhs.values.array() += xi.array() *
                              (dyn.Uhat.col(t + 1) + dyn.Uhat.col(t - 1)).array() /
                              eta.array();
        d = ((1.0 + xi.array().square()) / eta.array()).matrix();
      } else {
        rhs.values.array() += xi.array() * dyn.Uhat.col(M - 1).array() / eta.array();
        d = eta.cwiseInverse();
      }
      dyn.Uhat.col(t) = sample_block_precision(E, inv_s2, d, rhs, z).values;
    }

    SpectralCoeffs beta(L);
    beta.values = dyn.Uhat.col(t);
    u_fields.col(t) = plan.inverse(beta).values;
  }
}

double cross_cov(const DynamicsParams& p, double cos_u, double h, int L) {
  if (h < 0.0) throw std::invalid_argument("cross_cov: lag must be >= 0");
  p.validate();
  const double s2 = p.matern.sigma2;
  double sum = 0.0;
  double pl = 1.0, plm1 = 0.0;
  for (int l = 0; l <= L; ++l) {
    const double lam = p.matern.kappa * p.matern.kappa + static_cast<double>(l) * (l + 1);
    const double r = p.rate(l);
    sum += (2.0 * l + 1.0) * pl * std::pow(lam, -(p.matern.nu + 1.0)) *
           std::exp(-r * h) / r;
    const double plp1 = ((2.0 * l + 1.0) * cos_u * pl - l * plm1) / (l + 1.0);
    plm1 = pl;
    pl = plp1;
  }
  return s2 * sum / (4.0 * kPi);
}

double csep(const DynamicsParams& p, const Eigen::VectorXd& u_grid,
            const Eigen::VectorXd& h_grid, int L) {
  require(u_grid.size() > 0 && h_grid.size() > 0, "csep: grids must be nonempty");
  const double c00 = cross_cov(p, 1.0, 0.0, L);
  double worst = 0.0;
  for (int iu = 0; iu < u_grid.size(); ++iu) {
    const double cu = std::cos(u_grid[iu]);
    const double rho_s = cross_cov(p, cu, 0.0, L) / c00;
    for (int ih = 0; ih < h_grid.size(); ++ih) {
      const double h = h_grid[ih];
      require(h >= 0.0, "csep: lags must be >= 0");
      const double rho_t = cross_cov(p, 1.0, h, L) / c00;
      const double rho_st = cross_cov(p, cu, h, L) / c00;
      worst = std::max(worst, std::abs(rho_st - rho_s * rho_t));
    }
  }
  return worst;
}

}  // namespace sphcp
