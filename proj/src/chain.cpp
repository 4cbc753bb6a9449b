#include "sphcp/chain.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sphcp/errors.hpp"
#include "sphcp/io.hpp"
#include "sphcp/sim.hpp"
#include "sphcp/stats.hpp"
#include "sphcp/trunc_bounds.hpp"

namespace sphcp {

void ModelConfig::validate() const {
  if (K < 4 || K % 2 != 0) throw config_error("config: K must be even and >= 4");
  if (L < 0 || L > K / 2 - 1) throw config_error("config: need 0 <= L <= K/2-1");
  if (M_time < 2) throw config_error("config: M_time must be >= 2");
  if (iterations <= 0 || burn_in < 0 || burn_in >= iterations) {
    throw config_error("config: need 0 <= burn_in < iterations");
  }
  if (thinning < 1) throw config_error("config: thinning must be >= 1");
  if (!(muZ_matern.sigma2 > 0.0 && muZ_matern.kappa > 0.0 && muZ_matern.nu > 0.0)) {
    throw config_error("config: muZ Matern parameters must be positive");
  }
  if (!(U_kappa > 0.0 && U_nu > 0.0)) {
    throw config_error("config: U Matern parameters must be positive");
  }
  if (!(sigma_eps_prior_shape > 0.0 && sigma_eps_prior_scale > 0.0 &&
        sigma_U_prior_shape > 0.0 && sigma_U_prior_scale > 0.0)) {
    throw config_error("config: inverse-gamma hyperparameters must be positive");
  }
  if (!(mean_priors.mu1_var > 0.0 && mean_priors.mu2_var > 0.0 &&
        mean_priors.beta1_var > 0.0 && mean_priors.beta2_var > 0.0)) {
    throw config_error("config: mean prior variances must be positive");
  }
  if (!(gamma_cap_offset > 0.0)) {
    throw config_error("config: gamma_cap_offset must be positive");
  }
}

void WaicAccumulator::add_sample(const Eigen::VectorXd& loglik) {
  if (n_ == 0) {
    max_ = loglik;
    sumexp_ = Eigen::VectorXd::Ones(loglik.size());
    mean_ = loglik;
    m2_ = Eigen::VectorXd::Zero(loglik.size());
    n_ = 1;
    return;
  }
  if (loglik.size() != max_.size()) {
    throw std::invalid_argument("WaicAccumulator: observation count changed");
  }
  ++n_;
  for (Eigen::Index i = 0; i < loglik.size(); ++i) {
    const double ll = loglik[i];
    if (ll > max_[i]) {
      sumexp_[i] = sumexp_[i] * std::exp(max_[i] - ll) + 1.0;
      max_[i] = ll;
    } else {
      sumexp_[i] += std::exp(ll - max_[i]);
    }
    const double delta = ll - mean_[i];
    mean_[i] += delta / n_;
    m2_[i] += delta * (ll - mean_[i]);
  }
}

double WaicAccumulator::value() const {
  if (n_ < 2) {
    throw std::invalid_argument("waic: needs at least 2 samples");
  }
  double lppd = 0.0, p_waic = 0.0;
  for (Eigen::Index i = 0; i < max_.size(); ++i) {
    lppd += max_[i] + std::log(sumexp_[i]) - std::log(static_cast<double>(n_));
    p_waic += m2_[i] / (n_ - 1);
  }
  return -2.0 * (lppd - p_waic);
}

double waic(const Eigen::MatrixXd& loglik) {
  WaicAccumulator acc;
  for (Eigen::Index s = 0; s < loglik.rows(); ++s) {
    acc.add_sample(loglik.row(s).transpose());
  }
  return acc.value();
}

namespace {
Eigen::VectorXd expand_per_coeff(const Eigen::VectorXd& per_degree, int L) {
  Eigen::VectorXd out(SpectralCoeffs::size_for(L));
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) out[SpectralCoeffs::index(l, m)] = per_degree[l];
  }
  return out;
}
}  // namespace

Chain::Chain(const ModelConfig& cfg, const Eigen::MatrixXd& Y)
    : cfg_(cfg),
      Y_(Y),
      grid_(build_grid(cfg.K)),
      plan_(grid_, cfg.L),
      E_(grid_, cfg.L),
      means_(cfg.mean_model, cfg.mean_priors, static_cast<int>(Y.rows()), cfg.M_time) {
  cfg_.validate();
  const int N = grid_.n_points();
  const int M = cfg_.M_time;
  if (Y_.rows() != N || Y_.cols() != M) {
    throw config_error("chain: data must be N x M_time with N = 2K^2");
  }

  d_alpha_ = expand_per_coeff(spectral_density_vector(cfg_.muZ_matern, cfg_.L), cfg_.L);
  MaternSpec unitU{1.0, cfg_.U_kappa, cfg_.U_nu};
  s_U_ = expand_per_coeff(spectral_density_vector(unitU, cfg_.L), cfg_.L);

  // deterministic start: tau at "no change", thresholds at equal-probability
  // spacing shifted to pin gamma_1 = 0, flat latent fields
  cp_.M = M;
  cp_.mZ = cfg_.m_Z;
  cp_.gamma_cap = cfg_.m_Z + cfg_.gamma_cap_offset;
  cp_.tau = Eigen::VectorXi::Constant(N, M);
  const double vZ0 = covariance_series(cfg_.muZ_matern, 1.0, cfg_.L);
  cp_.gammas = thresholds_equal_prob(M, vZ0);
  cp_.gammas.array() -= cp_.gammas[0];
  if (cp_.gammas[M - 2] >= cp_.gamma_cap) {
    // keep the equal-probability shape but fit inside the prior anchor
    cp_.gammas *= 0.9 * cp_.gamma_cap / cp_.gammas[M - 2];
  }
  cp_.Z = Eigen::VectorXd::Constant(N, std::max(cfg_.m_Z, cp_.gammas[M - 2] + 1.0));
  cp_.alpha = SpectralCoeffs(cfg_.L);
  cp_.muZ_field = ScalarField(cfg_.K);
  cp_.muZ_field.values.setConstant(cfg_.m_Z);

  dyn_.L = cfg_.L;
  dyn_.M_time = M;
  dyn_.params = DynamicsParams::separable(0.5, 1.0, cfg_.U_kappa, cfg_.U_nu);
  dyn_.Uhat = Eigen::MatrixXd::Zero(SpectralCoeffs::size_for(cfg_.L), M + 1);
  U_ = Eigen::MatrixXd::Zero(N, M + 1);

  const double ybar = Y_.mean();
  means_.set_mu1(ybar);
  if (cfg_.mean_model == MeanModelKind::constant_constant) {
    means_.set_mu2(ybar);
  } else {
    means_.set_beta(Eigen::VectorXd::Constant(N, ybar), Eigen::VectorXd::Zero(N));
  }
  sigma2_eps_ = std::max((Y_.array() - ybar).square().mean(), 1e-12);
}

void Chain::set_xi(double v) {
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("set_xi: need 0 < xi < 1");
  dyn_.params.xi_r = -std::log(v);
}

Eigen::MatrixXd Chain::residual_minus_mean() const {
  const int N = static_cast<int>(Y_.rows()), M = cfg_.M_time;
  Eigen::MatrixXd out(N, M);
  for (int i = 0; i < N; ++i) {
    const int k = cp_.tau[i];
    for (int t = 1; t <= M; ++t) out(i, t - 1) = Y_(i, t - 1) - means_.mean(i, t, k);
  }
  return out;
}

void Chain::update_sigma_eps() {
  const int N = static_cast<int>(Y_.rows()), M = cfg_.M_time;
  double ssr = 0.0;
  for (int i = 0; i < N; ++i) {
    const int k = cp_.tau[i];
    for (int t = 1; t <= M; ++t) {
      const double e = Y_(i, t - 1) - means_.mean(i, t, k) - U_(i, t);
      ssr += e * e;
    }
  }
  const double shape = cfg_.sigma_eps_prior_shape + 0.5 * N * M;
  const double rate = cfg_.sigma_eps_prior_scale + 0.5 * ssr;
  RngStream rs(cfg_.seed, rngtag::kSigmaEps, static_cast<std::uint32_t>(iteration_), 0);
  sigma2_eps_ = rate / rs.gamma(shape);
}

void Chain::update_sigma_U() {
  const int M = cfg_.M_time;
  const int ncoef = SpectralCoeffs::size_for(cfg_.L);
  const double xi = dyn_.params.xi();
  double ss = 0.0;
  for (int c = 0; c < ncoef; ++c) {
    const double inv_s = 1.0 / s_U_[c];
    ss += dyn_.Uhat(c, 0) * dyn_.Uhat(c, 0) * (1.0 - xi * xi) * inv_s;
    for (int t = 1; t <= M; ++t) {
      const double e = dyn_.Uhat(c, t) - xi * dyn_.Uhat(c, t - 1);
      ss += e * e * inv_s;
    }
  }
  const double shape = cfg_.sigma_U_prior_shape + 0.5 * (M + 1) * ncoef;
  const double rate = cfg_.sigma_U_prior_scale + 0.5 * ss;
  RngStream rs(cfg_.seed, rngtag::kSigmaU, static_cast<std::uint32_t>(iteration_), 0);
  dyn_.params.matern.sigma2 = rate / rs.gamma(shape);
}

void Chain::update_xi() {
  const int M = cfg_.M_time;
  const int ncoef = SpectralCoeffs::size_for(cfg_.L);
  const double s2U = dyn_.params.matern.sigma2;

  double s0 = 0.0, s1 = 0.0, c0 = 0.0;
  for (int c = 0; c < ncoef; ++c) {
    const double inv_s = 1.0 / s_U_[c];
    c0 += dyn_.Uhat(c, 0) * dyn_.Uhat(c, 0) * inv_s;
    for (int t = 1; t <= M; ++t) {
      s0 += dyn_.Uhat(c, t - 1) * dyn_.Uhat(c, t - 1) * inv_s;
      s1 += dyn_.Uhat(c, t) * dyn_.Uhat(c, t - 1) * inv_s;
    }
  }
  auto log_target = [&](double xi) {
    return (xi * s1 - 0.5 * xi * xi * s0) / s2U +
           0.5 * ncoef * std::log1p(-xi * xi) - 0.5 * c0 * (1.0 - xi * xi) / s2U +
           std::log(xi) + std::log1p(-xi);
  };

  const double xi_cur = dyn_.params.xi();
  const double theta = std::log(xi_cur) - std::log1p(-xi_cur);
  RngStream rs(cfg_.seed, rngtag::kXi, static_cast<std::uint32_t>(iteration_), 0);
  const double theta_prop = theta + std::exp(xi_log_step_) * rs.normal();
  const double xi_prop = 1.0 / (1.0 + std::exp(-theta_prop));

  bool accept = false;
  if (xi_prop > 0.0 && xi_prop < 1.0) {
    const double log_ratio = log_target(xi_prop) - log_target(xi_cur);
    accept = std::log(rs.uniform()) < log_ratio;
  }
  if (accept) {
    dyn_.params.xi_r = -std::log(xi_prop);
    ++xi_accepts_;
  }
  ++xi_tries_;

  if (iteration_ < cfg_.burn_in) {
    // Robbins-Monro step tuning toward 35% acceptance, frozen after burn-in
    const double gain = 1.0 / std::pow(iteration_ + 1.0, 0.6);
    xi_log_step_ += gain * ((accept ? 1.0 : 0.0) - 0.35);
    xi_log_step_ = std::min(3.0, std::max(-8.0, xi_log_step_));
  }
}

void Chain::step() {
  const std::uint32_t it = static_cast<std::uint32_t>(iteration_);

  Eigen::MatrixXd dmm = residual_minus_mean();
  update_U(dyn_, dmm, sigma2_eps_, E_, plan_, U_, cfg_.seed, it);

  Eigen::MatrixXd resid = Y_ - U_.rightCols(cfg_.M_time);
  if (cfg_.use_mpm) {
    update_tau(resid, means_, sigma2_eps_, cp_, cfg_.seed, it);
    update_Z(cp_, cfg_.seed, it);
    update_gamma(cp_, cfg_.seed, it);
    update_muZ(cp_, E_, d_alpha_, plan_, cfg_.seed, it);
  } else {
    ind_update_tau(resid, means_, sigma2_eps_, cp_.M, cp_.tau, cfg_.seed, it);
  }

  means_.update(resid, cp_.tau, sigma2_eps_, cfg_.seed, it);
  update_sigma_eps();
  update_sigma_U();
  update_xi();
  ++iteration_;
}

Eigen::VectorXd Chain::observation_loglik() const {
  const int N = static_cast<int>(Y_.rows()), M = cfg_.M_time;
  Eigen::VectorXd ll(static_cast<Eigen::Index>(N) * M);
  const double c = -0.5 * std::log(2.0 * kPi * sigma2_eps_);
  const double inv2s = 0.5 / sigma2_eps_;
  for (int i = 0; i < N; ++i) {
    const int k = cp_.tau[i];
    for (int t = 1; t <= M; ++t) {
      const double e = Y_(i, t - 1) - means_.mean(i, t, k) - U_(i, t);
      ll[static_cast<Eigen::Index>(i) * M + (t - 1)] = c - e * e * inv2s;
    }
  }
  return ll;
}

PosteriorSummary Chain::run(const std::string& archive_dir) {
  const int N = static_cast<int>(Y_.rows());
  const int M = cfg_.M_time;
  const int n_keep = (cfg_.iterations - cfg_.burn_in + cfg_.thinning - 1) / cfg_.thinning;

  Eigen::VectorXd tau_sum = Eigen::VectorXd::Zero(N);
  Eigen::MatrixXi tau_counts = Eigen::MatrixXi::Zero(N, M);
  Eigen::MatrixXi tau_samples;
  const bool archiving = !archive_dir.empty();
  if (archiving) tau_samples.resize(N, n_keep);

  PosteriorSummary s;
  WaicAccumulator wa;
  int kept = 0;
  for (int i = 0; i < cfg_.iterations; ++i) {
    try {
      step();
    } catch (const numerical_error& e) {
      throw numerical_error("iteration " + std::to_string(i) + ": " + e.what());
    }
    if (i >= cfg_.burn_in && (i - cfg_.burn_in) % cfg_.thinning == 0) {
      for (int j = 0; j < N; ++j) {
        tau_sum[j] += cp_.tau[j];
        tau_counts(j, cp_.tau[j] - 1) += 1;
      }
      if (archiving) tau_samples.col(kept) = cp_.tau;
      s.sigma2_eps_trace.push_back(sigma2_eps_);
      s.sigma2_U_trace.push_back(dyn_.params.matern.sigma2);
      s.xi_trace.push_back(dyn_.params.xi());
      s.mu1_trace.push_back(means_.mu1());
      s.mu2_trace.push_back(means_.mu2());
      wa.add_sample(observation_loglik());
      ++kept;
    }
  }

  s.n_samples = kept;
  s.tau_mean = tau_sum / kept;
  s.tau_mode.resize(N);
  s.tau_mode_prob.resize(N);
  s.changepoint_flag.resize(N);
  for (int j = 0; j < N; ++j) {
    int best = 0;
    for (int k = 1; k < M; ++k) {
      if (tau_counts(j, k) > tau_counts(j, best)) best = k;
    }
    s.tau_mode[j] = best + 1;
    s.tau_mode_prob[j] = static_cast<double>(tau_counts(j, best)) / kept;
    s.changepoint_flag[j] = (best + 1 == M) ? 0 : 1;
  }
  s.waic = (kept >= 2) ? wa.value() : 0.0;

  if (archiving) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(archive_dir, ec);
    write_tau_archive(archive_dir + "/tau_samples.stau", M, tau_samples);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < kept; ++i) {
      rows.push_back({static_cast<double>(i), s.sigma2_eps_trace[i],
                      s.sigma2_U_trace[i], s.xi_trace[i], s.mu1_trace[i],
                      s.mu2_trace[i]});
    }
    write_csv(archive_dir + "/scalars.csv",
              {"sample", "sigma2_eps", "sigma2_U", "xi", "mu1", "mu2"}, rows);
    std::ofstream manifest(archive_dir + "/manifest.txt");
    manifest << "K=" << cfg_.K << "\nL=" << cfg_.L << "\nM_time=" << M
             << "\nn_samples=" << kept << "\nseed=" << cfg_.seed
             << "\nprior=" << (cfg_.use_mpm ? "mpm" : "ind") << "\n";
    if (cfg_.archive_fields) {
      write_sfld(archive_dir + "/u_last.sfld", cfg_.K, U_);
      Eigen::MatrixXd alpha_mat = cp_.alpha.values;
      write_scof(archive_dir + "/alpha_last.scof", cfg_.L, alpha_mat);
      std::ofstream side(archive_dir + "/probit_sidecar.txt");
      side << "m_Z=" << cp_.mZ << "\ngamma_cap=" << cp_.gamma_cap << "\ngammas=";
      for (int k = 0; k < cp_.gammas.size(); ++k) {
        side << (k ? "," : "") << cp_.gammas[k];
      }
      side << "\n";
    }
  }
  return s;
}

PosteriorSummary summarize_archive(const std::string& dir) {
  int M = 0;
  Eigen::MatrixXi samples = read_tau_archive(dir + "/tau_samples.stau", &M);
  const int N = static_cast<int>(samples.rows());
  const int S = static_cast<int>(samples.cols());
  PosteriorSummary s;
  s.n_samples = S;
  s.tau_mean = samples.cast<double>().rowwise().mean();
  s.tau_mode.resize(N);
  s.tau_mode_prob.resize(N);
  s.changepoint_flag.resize(N);
  for (int j = 0; j < N; ++j) {
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(M);
    for (int i = 0; i < S; ++i) counts[samples(j, i) - 1] += 1;
    int best = 0;
    for (int k = 1; k < M; ++k) {
      if (counts[k] > counts[best]) best = k;
    }
    s.tau_mode[j] = best + 1;
    s.tau_mode_prob[j] = static_cast<double>(counts[best]) / S;
    s.changepoint_flag[j] = (best + 1 == M) ? 0 : 1;
  }
  return s;
}

CoupledResult run_coupled(const ModelConfig& base, const Eigen::MatrixXd& Y,
                          const Eigen::VectorXd& tau_truth,
                          const std::vector<int>& levels) {
  CoupledResult out;
  DHGrid grid = build_grid(base.K);
  for (int L : levels) {
    ModelConfig cfg = base;
    cfg.L = L;
    cfg.use_mpm = false;  // truncation comparisons hold the prior fixed
    cfg.coupling = true;
    Chain chain(cfg, Y);
    PosteriorSummary s = chain.run();
    out.levels.push_back(L);
    out.g_rmse.push_back(g_rmse(tau_truth, s.tau_mean, grid));
  }
  return out;
}

}  // namespace sphcp
