#include "sphcp/sim.hpp"

#include <cmath>
#include <set>

#include "sphcp/errors.hpp"
#include "sphcp/grf.hpp"
#include "sphcp/rng.hpp"
#include "sphcp/sht.hpp"
#include "sphcp/stats.hpp"

namespace sphcp {

namespace {
constexpr int kSupportLo = 6;
constexpr int kSupportHi = 55;

int clamp_support(double v) {
  const int k = static_cast<int>(std::floor(v));
  return std::min(kSupportHi, std::max(kSupportLo, k));
}
}  // namespace

void SimConfig::validate() const {
  if (K < 4 || K % 2 != 0) throw config_error("sim: K must be even and >= 4");
  if (M_time < kSupportHi + 1) {
    throw config_error("sim: M_time must be >= 56 so the support {6..55} fits");
  }
  if (!(delta >= 0.0)) throw config_error("sim: delta must be >= 0");
  if (!(sigma2_eps >= 0.0)) throw config_error("sim: sigma2_eps must be >= 0");
  if (!(xi > 0.0 && xi < 1.0)) throw config_error("sim: xi must be in (0,1)");
  if (n_replicates < 1) throw config_error("sim: replicates must be >= 1");
}

Eigen::VectorXi gen_changepoints_minmax(const ScalarField& tau_tilde) {
  const double lo = tau_tilde.values.minCoeff();
  const double hi = tau_tilde.values.maxCoeff();
  if (!(hi > lo)) throw config_error("gen_changepoints_minmax: constant field");
  Eigen::VectorXi tau(tau_tilde.size());
  for (int i = 0; i < tau_tilde.size(); ++i) {
    const double scaled = (tau_tilde.values[i] - lo) / (hi - lo) * 49.0 + 6.0;
    tau[i] = clamp_support(scaled);
  }
  return tau;
}

Eigen::VectorXi gen_changepoints_cdf(const ScalarField& tau_tilde, double marginal_sd) {
  if (!(marginal_sd > 0.0)) {
    throw config_error("gen_changepoints_cdf: marginal sd must be positive");
  }
  Eigen::VectorXi tau(tau_tilde.size());
  for (int i = 0; i < tau_tilde.size(); ++i) {
    const double u = norm_cdf(tau_tilde.values[i] / marginal_sd);
    tau[i] = clamp_support(u * 50.0 + 6.0);
  }
  return tau;
}

SimDataset gen_dataset(const SimConfig& cfg, int replicate) {
  cfg.validate();
  const DHGrid grid = build_grid(cfg.K);
  const int L = grid.Lmax();
  const int N = grid.n_points();
  const int M = cfg.M_time;
  const ShtPlan plan(grid, L);
  const std::uint32_t rep = static_cast<std::uint32_t>(replicate);

  // changepoints from the auxiliary Matern field
  MaternSpec tau_spec{1.0, cfg.tau_kappa, cfg.tau_nu};
  GrfDraw tt = sample_grf(tau_spec, L, plan, cfg.seed, rngtag::kSimTau, rep);
  SimDataset ds;
  if (cfg.generator == CpGenerator::minmax) {
    ds.tau = gen_changepoints_minmax(tt.field);
  } else {
    const double sd = std::sqrt(covariance_series(tau_spec, 1.0, L));
    ds.tau = gen_changepoints_cdf(tt.field, sd);
  }

  // separable spectral AR(1) error process
  DynamicsParams dp = DynamicsParams::separable(cfg.xi, cfg.U_matern.sigma2,
                                                cfg.U_matern.kappa, cfg.U_matern.nu);
  DynamicsState path = sample_prior_path(dp, L, M, cfg.seed, rep);

  ds.mu1 = cfg.mu1;
  ds.mu2 = cfg.mu1 + cfg.delta;
  ds.Y.resize(N, M);
  const double sd_eps = std::sqrt(cfg.sigma2_eps);
  SpectralCoeffs beta(L);
  for (int t = 1; t <= M; ++t) {
    beta.values = path.Uhat.col(t);
    const ScalarField Ut = plan.inverse(beta);
    for (int i = 0; i < N; ++i) {
      RngStream rs(cfg.seed, rngtag::kSimNoise,
                   rep * static_cast<std::uint32_t>(M + 1) + t,
                   static_cast<std::uint32_t>(i));
      const double mean = (t <= ds.tau[i]) ? ds.mu1 : ds.mu2;
      ds.Y(i, t - 1) = mean + Ut.values[i] + sd_eps * rs.normal();
    }
  }
  return ds;
}

double g_rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate,
              const DHGrid& grid) {
  require(truth.size() == estimate.size() && truth.size() == grid.n_points(),
          "g_rmse: dimension mismatch");
  double s = 0.0;
  const int nphi = 2 * grid.K;
  for (int i = 0; i < grid.K; ++i) {
    const double w = grid.weights[i];
    if (w == 0.0) continue;
    for (int j = 0; j < nphi; ++j) {
      const Eigen::Index idx = static_cast<Eigen::Index>(i) * nphi + j;
      const double d = truth[idx] - estimate[idx];
      s += w * d * d;
    }
  }
  return std::sqrt(s / (4.0 * kPi));
}

namespace {
// profiled SSE at fixed decay rate: a, c from linear least squares
double profiled_sse(const std::vector<std::pair<double, double>>& pts, double b,
                    double* a_out, double* c_out) {
  const int n = static_cast<int>(pts.size());
  double sxx = 0.0, sx = 0.0, sxy = 0.0, sy = 0.0;
  for (const auto& [L, y] : pts) {
    const double x = std::exp(-b * L);
    sxx += x * x;
    sx += x;
    sxy += x * y;
    sy += y;
  }
  const double det = sxx * n - sx * sx;
  double a, c;
  if (std::abs(det) < 1e-14 * (sxx * n + 1.0)) {
    a = 0.0;  // collinear design (b ~ 0): mean-only fit
    c = sy / n;
  } else {
    a = (sxy * n - sx * sy) / det;
    c = (sxx * sy - sx * sxy) / det;
  }
  double sse = 0.0;
  for (const auto& [L, y] : pts) {
    const double r = y - (a * std::exp(-b * L) + c);
    sse += r * r;
  }
  if (a_out) *a_out = a;
  if (c_out) *c_out = c;
  return sse;
}
}  // namespace

ExpDecayFit fit_exp_decay(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_exp_decay: need at least 3 points");
  }
  {
    std::set<double> ls;
    for (const auto& [L, y] : points) ls.insert(L);
    if (ls.size() < 3) {
      throw std::invalid_argument("fit_exp_decay: need 3 distinct L values");
    }
  }

  double ylo = points.front().second, yhi = points.front().second;
  for (const auto& [L, y] : points) {
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  ExpDecayFit fit;
  if (yhi - ylo == 0.0) {
    fit.b = 0.0;
    fit.a = 0.0;
    fit.c = points.front().second;
    fit.resid_norm = 0.0;
    return fit;
  }

  // coarse scan to bracket the optimum (the profiled SSE flattens for large
  // b, which would defeat a bare golden section), then golden refinement
  const int n_scan = 200;
  const double b_max = 5.0;
  int best = 0;
  double best_sse = profiled_sse(points, 0.0, nullptr, nullptr);
  for (int i = 1; i <= n_scan; ++i) {
    const double b = b_max * i / n_scan;
    const double sse = profiled_sse(points, b, nullptr, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  double lo = b_max * std::max(0, best - 1) / n_scan;
  double hi = b_max * std::min(n_scan, best + 1) / n_scan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = profiled_sse(points, x1, nullptr, nullptr);
  double f2 = profiled_sse(points, x2, nullptr, nullptr);
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = profiled_sse(points, x1, nullptr, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = profiled_sse(points, x2, nullptr, nullptr);
    }
  }
  const double b = 0.5 * (lo + hi);
  double a, c;
  const double sse = profiled_sse(points, b, &a, &c);
  // compare against the flat fit so degenerate data returns b = 0 exactly
  double a0, c0;
  const double sse0 = profiled_sse(points, 0.0, &a0, &c0);
  if (sse0 <= sse) {
    fit.b = 0.0;
    fit.a = a0;
    fit.c = c0;
    fit.resid_norm = std::sqrt(sse0);
  } else {
    fit.b = b;
    fit.a = a;
    fit.c = c;
    fit.resid_norm = std::sqrt(sse);
  }
  return fit;
}

}  // namespace sphcp
