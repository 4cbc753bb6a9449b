#include "sphcp/dense_oracle.hpp"

#include <cmath>
#include <vector>

#include "sphcp/errors.hpp"
#include "sphcp/legendre.hpp"
#include "sphcp/stats.hpp"
#include "sphcp/trunc_bounds.hpp"

namespace sphcp {

double cos_angle(const DHGrid& grid, int i, int j, int ip, int jp) {
  const double t1 = grid.colatitudes[i], t2 = grid.colatitudes[ip];
  const double dphi = grid.longitudes[j] - grid.longitudes[jp];
  double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(dphi);
  return std::min(1.0, std::max(-1.0, c));
}

Eigen::MatrixXd dense_psi(const DHGrid& grid, int L, bool allow_large) {
  if (!allow_large && grid.K > 16) {
    throw std::invalid_argument("dense_psi: oracle guarded to K <= 16");
  }
  require(L <= grid.Lmax(), "dense_psi: L exceeds grid capacity");
  const int K = grid.K, nphi = 2 * K;
  const int ncoef = SpectralCoeffs::size_for(L);
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(K) * nphi, ncoef);

  std::vector<double> plm(static_cast<std::size_t>(L) + 1);
  for (int i = 0; i < K; ++i) {
    const double x = std::cos(grid.colatitudes[i]);
    for (int m = 0; m <= L; ++m) {
      assoc_legendre_bar_row(L, m, x, plm.data());
      for (int l = m; l <= L; ++l) {
        for (int j = 0; j < nphi; ++j) {
          const Eigen::Index row = static_cast<Eigen::Index>(i) * nphi + j;
          const double phi = grid.longitudes[j];
          psi(row, SpectralCoeffs::index(l, m)) = plm[l] * std::cos(m * phi);
          if (m > 0) {
            psi(row, SpectralCoeffs::index(l, -m)) = plm[l] * std::sin(m * phi);
          }
        }
      }
    }
  }
  return psi;
}

Eigen::MatrixXd dense_cov(const MaternSpec& spec, const DHGrid& grid, int L,
                          bool allow_large) {
  if (!allow_large && grid.K > 16) {
    throw std::invalid_argument("dense_cov: oracle guarded to K <= 16");
  }
  const int K = grid.K, nphi = 2 * K;
  const Eigen::Index N = static_cast<Eigen::Index>(K) * nphi;

  // unique separations: (i, i' >= i, longitude offset)
  const std::size_t n_pairs = static_cast<std::size_t>(K) * (K + 1) / 2;
  Eigen::VectorXd cos_vals(static_cast<Eigen::Index>(n_pairs) * nphi);
  std::size_t p = 0;
  for (int i = 0; i < K; ++i) {
    for (int ip = i; ip < K; ++ip) {
      for (int dj = 0; dj < nphi; ++dj, ++p) {
        cos_vals[static_cast<Eigen::Index>(p)] = cos_angle(grid, i, 0, ip, dj);
      }
    }
  }

  Eigen::VectorXd vals;
  if (L >= 0) {
    vals = covariance_series_batch(spec, cos_vals, L);
  } else {
    vals.resize(cos_vals.size());
    for (Eigen::Index q = 0; q < cos_vals.size(); ++q) {
      vals[q] = covariance_series(spec, cos_vals[q], -1);
    }
  }

  // scatter back through the (i, i', dj) index
  std::vector<std::size_t> pair_base(static_cast<std::size_t>(K) * K);
  p = 0;
  for (int i = 0; i < K; ++i) {
    for (int ip = i; ip < K; ++ip) {
      pair_base[static_cast<std::size_t>(i) * K + ip] = p;
      pair_base[static_cast<std::size_t>(ip) * K + i] = p;
      p += static_cast<std::size_t>(nphi);
    }
  }
  Eigen::MatrixXd cov(N, N);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < nphi; ++j) {
      const Eigen::Index r = static_cast<Eigen::Index>(i) * nphi + j;
      for (int ip = 0; ip < K; ++ip) {
        const std::size_t base = pair_base[static_cast<std::size_t>(i) * K + ip];
        for (int jp = 0; jp < nphi; ++jp) {
          const int dj = (j - jp + nphi) % nphi;
          cov(r, static_cast<Eigen::Index>(ip) * nphi + jp) =
              vals[static_cast<Eigen::Index>(base + dj)];
        }
      }
    }
  }
  return cov;
}

DenseMpmChain::DenseMpmChain(const ModelConfig& cfg, const Eigen::MatrixXd& Y,
                             int L_cov)
    : cfg_(cfg),
      Y_(Y),
      grid_(build_grid(cfg.K)),
      means_(cfg.mean_model, cfg.mean_priors, static_cast<int>(Y.rows()), cfg.M_time) {
  cfg_.validate();
  const int N = grid_.n_points();
  const int M = cfg_.M_time;
  if (Y_.rows() != N || Y_.cols() != M) {
    throw config_error("dense chain: data must be N x M_time with N = 2K^2");
  }

  MaternSpec unitU{1.0, cfg_.U_kappa, cfg_.U_nu};
  sigma_U_unit_ = dense_cov(unitU, grid_, L_cov, true);
  {
    // smooth spectra leave trailing eigenvalues at the round-off floor, so
    // escalate a small diagonal jitter until the factorization holds
    Eigen::LLT<Eigen::MatrixXd> llt;
    const double d0 = sigma_U_unit_.diagonal().mean();
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
      sigma_U_unit_.diagonal().array() += jitter * d0;
      llt.compute(sigma_U_unit_);
      if (llt.info() == Eigen::Success) break;
    }
    if (llt.info() != Eigen::Success) {
      throw singular_operator_error("dense chain: Sigma_U factorization failed");
    }
    sigma_U_chol_ = llt.matrixL();
    sigma_U_unit_inv_ = llt.solve(Eigen::MatrixXd::Identity(N, N));
  }

  // muZ posterior pieces are iteration-invariant: gain = Sigma (Sigma+I)^{-1},
  // covariance = Sigma - gain Sigma
  {
    Eigen::MatrixXd sigma_Z = dense_cov(cfg_.muZ_matern, grid_, L_cov, true);
    Eigen::MatrixXd B = sigma_Z + Eigen::MatrixXd::Identity(N, N);
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) {
      throw singular_operator_error("dense chain: Sigma_Z + I factorization failed");
    }
    muZ_gain_ = llt.solve(sigma_Z).transpose();  // Sigma (Sigma+I)^{-1}
    Eigen::MatrixXd cov = sigma_Z - muZ_gain_ * sigma_Z;
    cov = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> lltc;
    const double c0 = cov.diagonal().mean();
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
      cov.diagonal().array() += jitter * c0;
      lltc.compute(cov);
      if (lltc.info() == Eigen::Success) break;
    }
    if (lltc.info() != Eigen::Success) {
      throw singular_operator_error("dense chain: muZ covariance factorization failed");
    }
    muZ_cov_chol_ = lltc.matrixL();
  }

  cp_.M = M;
  cp_.mZ = cfg_.m_Z;
  cp_.gamma_cap = cfg_.m_Z + cfg_.gamma_cap_offset;
  cp_.tau = Eigen::VectorXi::Constant(N, M);
  const double vZ0 = covariance_series(cfg_.muZ_matern, 1.0, cfg_.L);
  cp_.gammas = thresholds_equal_prob(M, vZ0);
  cp_.gammas.array() -= cp_.gammas[0];
  cp_.Z = Eigen::VectorXd::Constant(N, std::max(cfg_.m_Z, cp_.gammas[M - 2] + 1.0));
  cp_.alpha = SpectralCoeffs(cfg_.L);
  cp_.muZ_field = ScalarField(cfg_.K);
  cp_.muZ_field.values.setConstant(cfg_.m_Z);

  U_ = Eigen::MatrixXd::Zero(N, M + 1);
  const double ybar = Y_.mean();
  means_.set_mu1(ybar);
  if (cfg_.mean_model == MeanModelKind::constant_constant) means_.set_mu2(ybar);
  sigma2_eps_ = std::max((Y_.array() - ybar).square().mean(), 1e-12);
}

void DenseMpmChain::update_U_dense() {
  const int N = grid_.n_points(), M = cfg_.M_time;
  const std::uint32_t base_key =
      static_cast<std::uint32_t>(iteration_) * static_cast<std::uint32_t>(M + 1);
  const double inv_s2 = 1.0 / sigma2_eps_;
  const double inv_su = 1.0 / sigma2_U_;

  // interior and terminal precisions change with (sigma2_eps, xi, sigma2_U)
  Eigen::MatrixXd P_int = (1.0 + xi_ * xi_) * inv_su * sigma_U_unit_inv_;
  P_int.diagonal().array() += inv_s2;
  Eigen::LLT<Eigen::MatrixXd> llt_int(P_int);
  Eigen::MatrixXd P_end = inv_su * sigma_U_unit_inv_;
  P_end.diagonal().array() += inv_s2;
  Eigen::LLT<Eigen::MatrixXd> llt_end(P_end);
  if (llt_int.info() != Eigen::Success || llt_end.info() != Eigen::Success) {
    throw singular_operator_error("dense chain: U precision factorization failed");
  }

  Eigen::VectorXd z(N), rhs(N);
  for (int t = 0; t <= M; ++t) {
    for (int i = 0; i < N; ++i) {
      RngStream rs(cfg_.seed, rngtag::kU, base_key + static_cast<std::uint32_t>(t),
                   static_cast<std::uint32_t>(i));
      z[i] = rs.normal();
    }
    if (t == 0) {
      U_.col(0) = xi_ * U_.col(1) + std::sqrt(sigma2_U_) * (sigma_U_chol_ * z);
      continue;
    }
    Eigen::VectorXd ymm(N);
    for (int i = 0; i < N; ++i) {
      ymm[i] = Y_(i, t - 1) - means_.mean(i, t, cp_.tau[i]);
    }
    const bool interior = (t < M);
    rhs = inv_s2 * ymm;
    if (interior) {
      rhs += xi_ * inv_su * (sigma_U_unit_inv_ * (U_.col(t + 1) + U_.col(t - 1)));
    } else {
      rhs += xi_ * inv_su * (sigma_U_unit_inv_ * U_.col(M - 1));
    }
    const auto& llt = interior ? llt_int : llt_end;
    U_.col(t) = llt.solve(rhs) +
                llt.matrixU().solve(z);  // mean + P^{-1/2} draw
  }
}

void DenseMpmChain::update_muZ_dense() {
  const int N = grid_.n_points();
  Eigen::VectorXd z(N);
  for (int i = 0; i < N; ++i) {
    RngStream rs(cfg_.seed, rngtag::kAlpha, static_cast<std::uint32_t>(iteration_),
                 static_cast<std::uint32_t>(i));
    z[i] = rs.normal();
  }
  Eigen::VectorXd dev = cp_.Z.array() - cp_.mZ;
  cp_.muZ_field.values = (muZ_gain_ * dev + muZ_cov_chol_ * z).array() + cp_.mZ;
}

void DenseMpmChain::update_sigma_eps() {
  const int N = grid_.n_points(), M = cfg_.M_time;
  double ssr = 0.0;
  for (int i = 0; i < N; ++i) {
    const int k = cp_.tau[i];
    for (int t = 1; t <= M; ++t) {
      const double e = Y_(i, t - 1) - means_.mean(i, t, k) - U_(i, t);
      ssr += e * e;
    }
  }
  RngStream rs(cfg_.seed, rngtag::kSigmaEps, static_cast<std::uint32_t>(iteration_), 0);
  sigma2_eps_ = (cfg_.sigma_eps_prior_scale + 0.5 * ssr) /
                rs.gamma(cfg_.sigma_eps_prior_shape + 0.5 * N * M);
}

void DenseMpmChain::update_sigma_U() {
  const int N = grid_.n_points(), M = cfg_.M_time;
  double ss = 0.0;
  Eigen::VectorXd e(N);
  for (int t = 1; t <= M; ++t) {
    e = U_.col(t) - xi_ * U_.col(t - 1);
    ss += e.dot(sigma_U_unit_inv_ * e);
  }
  ss += (1.0 - xi_ * xi_) * U_.col(0).dot(sigma_U_unit_inv_ * U_.col(0));
  RngStream rs(cfg_.seed, rngtag::kSigmaU, static_cast<std::uint32_t>(iteration_), 0);
  sigma2_U_ = (cfg_.sigma_U_prior_scale + 0.5 * ss) /
              rs.gamma(cfg_.sigma_U_prior_shape + 0.5 * (M + 1) * N);
}

void DenseMpmChain::update_xi() {
  const int N = grid_.n_points(), M = cfg_.M_time;
  double s0 = 0.0, s1 = 0.0, c0 = 0.0;
  for (int t = 1; t <= M; ++t) {
    const Eigen::VectorXd w = sigma_U_unit_inv_ * U_.col(t - 1);
    s0 += U_.col(t - 1).dot(w);
    s1 += U_.col(t).dot(w);
  }
  c0 = U_.col(0).dot(sigma_U_unit_inv_ * U_.col(0));
  auto log_target = [&](double xi) {
    return (xi * s1 - 0.5 * xi * xi * s0) / sigma2_U_ +
           0.5 * N * std::log1p(-xi * xi) - 0.5 * c0 * (1.0 - xi * xi) / sigma2_U_ +
           std::log(xi) + std::log1p(-xi);
  };
  RngStream rs(cfg_.seed, rngtag::kXi, static_cast<std::uint32_t>(iteration_), 0);
  const double theta = std::log(xi_) - std::log1p(-xi_);
  const double theta_prop = theta + std::exp(xi_log_step_) * rs.normal();
  const double xi_prop = 1.0 / (1.0 + std::exp(-theta_prop));
  bool accept = false;
  if (xi_prop > 0.0 && xi_prop < 1.0) {
    accept = std::log(rs.uniform()) < log_target(xi_prop) - log_target(xi_);
  }
  if (accept) xi_ = xi_prop;
  if (iteration_ < cfg_.burn_in) {
    const double gain = 1.0 / std::pow(iteration_ + 1.0, 0.6);
    xi_log_step_ += gain * ((accept ? 1.0 : 0.0) - 0.35);
    xi_log_step_ = std::min(3.0, std::max(-8.0, xi_log_step_));
  }
}

void DenseMpmChain::step() {
  const std::uint32_t it = static_cast<std::uint32_t>(iteration_);
  update_U_dense();
  Eigen::MatrixXd resid = Y_ - U_.rightCols(cfg_.M_time);
  update_tau(resid, means_, sigma2_eps_, cp_, cfg_.seed, it);
  update_Z(cp_, cfg_.seed, it);
  update_gamma(cp_, cfg_.seed, it);
  update_muZ_dense();
  means_.update(resid, cp_.tau, sigma2_eps_, cfg_.seed, it);
  update_sigma_eps();
  update_sigma_U();
  update_xi();
  ++iteration_;
}

}  // namespace sphcp
