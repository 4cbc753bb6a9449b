// Acceptance suite: runs each numbered criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Run all with no arguments or a
// single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "sphcp/chain.hpp"
#include "sphcp/changepoint.hpp"
#include "sphcp/dense_oracle.hpp"
#include "sphcp/dynamics.hpp"
#include "sphcp/grf.hpp"
#include "sphcp/legendre.hpp"
#include "sphcp/sim.hpp"
#include "sphcp/stats.hpp"
#include "sphcp/trunc_bounds.hpp"

using namespace sphcp;

namespace {

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<bool(std::string&)> run;
};

Eigen::VectorXd point_weights(const DHGrid& grid) {
  Eigen::VectorXd w(grid.n_points());
  for (int i = 0, p = 0; i < grid.K; ++i) {
    for (int j = 0; j < 2 * grid.K; ++j, ++p) w[p] = grid.weights[i];
  }
  return w;
}

// ---------------------------------------------------------------- criterion 1
bool crit_quadrature(std::string& detail) {
  double worst = 0.0;
  for (int K : {8, 16, 32}) {
    DHGrid grid = build_grid(K);
    const int L = grid.Lmax();
    Eigen::MatrixXd psi = dense_psi(grid, L, true);
    Eigen::VectorXd w = point_weights(grid);
    const int n = SpectralCoeffs::size_for(L);
    Eigen::MatrixXd gram = psi.transpose() * w.asDiagonal() * psi;
    worst = std::max(worst,
                     (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  detail = "max |Psi^T D_w Psi - I| = " + std::to_string(worst);
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 2
bool crit_roundtrip(std::string& detail) {
  double worst = 0.0;
  for (int K : {8, 16, 32}) {
    DHGrid grid = build_grid(K);
    ShtPlan plan(grid, grid.Lmax());
    SpectralCoeffs beta(grid.Lmax());
    for (int rep = 0; rep < 100; ++rep) {
      for (int i = 0; i < beta.size(); ++i) {
        RngStream rs(42 + K, rngtag::kTest, static_cast<std::uint32_t>(rep),
                     static_cast<std::uint32_t>(i));
        beta.values[i] = rs.normal();
      }
      ScalarField f = plan.inverse(beta);
      ScalarField f2 = plan.inverse(plan.forward(f));
      worst = std::max(worst, (f.values - f2.values).cwiseAbs().maxCoeff());
    }
  }
  detail = "max roundtrip error = " + std::to_string(worst);
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 3
bool crit_census(std::string& detail) {
  DHGrid g32 = build_grid(32);
  for (int L = 1; L <= 10; ++L) {
    ErrorOperator E(g32, L);
    std::size_t want = 0;
    for (int m = -L; m <= L; ++m) {
      const std::size_t n = static_cast<std::size_t>(L + 1 - std::abs(m));
      want += (n * n + 1) / 2;
    }
    if (E.nonzero_count() != want) {
      detail = "census mismatch at L=" + std::to_string(L);
      return false;
    }
  }

  DHGrid g8 = build_grid(8);
  const int L = 3;
  Eigen::MatrixXd psi = dense_psi(g8, L);
  Eigen::VectorXd w = point_weights(g8);
  Eigen::MatrixXd dense =
      psi.transpose() * w.cwiseProduct(w).asDiagonal() * psi;
  const int n = SpectralCoeffs::size_for(L);
  double worst_zero = 0.0;
  for (int a = 0; a < n; ++a) {
    const int la = static_cast<int>(std::floor(std::sqrt(static_cast<double>(a))));
    const int ma = a - la * la - la;
    for (int b = 0; b < n; ++b) {
      const int lb = static_cast<int>(std::floor(std::sqrt(static_cast<double>(b))));
      const int mb = b - lb * lb - lb;
      if (ma != mb || (la + lb) % 2 != 0) {
        worst_zero = std::max(worst_zero, std::abs(dense(a, b)));
      }
    }
  }
  detail = "L=1 count 4, L=2 count 11 verified; structural zeros <= " +
           std::to_string(worst_zero);
  return worst_zero < 1e-12;
}

// ---------------------------------------------------------------- criterion 4
bool crit_table_b1(std::string& detail) {
  struct Row {
    int M;
    double vZ, nu, want;
  };
  const Row rows[] = {{10, 1.0, 1.0, 0.2913},
                      {10, 1.0, 2.0, 0.0160},
                      {50, 5.0, 1.0, 2.4789}};
  const double kappa = 5.0;
  const int L = 89;

  bool pass = true;
  char buf[256];
  detail = "";
  for (const Row& r : rows) {
    auto in = make_trunc_bound_input(r.M, thresholds_equal_prob(r.M, r.vZ), r.vZ,
                                     kappa, r.nu, L);
    const double mae = expected_mae_bound(in);
    const double tol = std::max(0.02 * r.want, 0.002);
    const bool ok = std::abs(mae - r.want) <= tol;
    pass = pass && ok;
    std::snprintf(buf, sizeof(buf), "(M=%d,vZ=%g,nu=%g): got %.4f want %.4f%s; ",
                  r.M, r.vZ, r.nu, mae, r.want, ok ? "" : " MISMATCH");
    detail += buf;
  }

  if (!pass) {
    // diagnostic: both readings of the v_Z exponent (the source definition is
    // ambiguous between -(nu+1) and -nu+1), with the MAE sum shown unclamped
    // and restricted to a <= M-2
    auto raw_sums = [&](const TruncBoundInput& in, double* full, double* drop) {
      double s = 0.0;
      for (int a = 0; a < in.M - 1; ++a) s += cp_agreement_bound(in, a);
      *drop = (in.M - 1.0) - s;
      *full = *drop - cp_agreement_bound(in, in.M - 1);
    };
    for (int literal = 0; literal < 2; ++literal) {
      detail += literal ? "| literal -nu+1 reading (full, a<=M-2): "
                        : "| adopted -(nu+1) reading (full, a<=M-2): ";
      for (const Row& r : rows) {
        TruncBoundInput in;
        in.M = r.M;
        in.gammas = thresholds_equal_prob(r.M, r.vZ);
        in.vZ = r.vZ;
        in.kappa = kappa;
        in.nu = r.nu;
        in.L = L;
        in.sigmaZ = literal ? sigma_z_from_vz_literal(r.vZ, kappa, r.nu, L)
                            : sigma_z_from_vz(r.vZ, kappa, r.nu, L);
        double full = 0.0, drop = 0.0;
        raw_sums(in, &full, &drop);
        std::snprintf(buf, sizeof(buf), "(%.4f, %.4f) ", full, drop);
        detail += buf;
      }
    }
    detail +=
        "| neither exponent reading reproduces the reference values under "
        "the stated MAE sum or its a<=M-2 variant; the bound is implemented "
        "exactly as its definition is written";
  }
  return pass;
}

// ---------------------------------------------------------------- criterion 5
bool crit_gibbs_oracle(std::string& detail) {
  DHGrid grid = build_grid(8);
  const int L = 3, M = 3;
  const int ncoef = SpectralCoeffs::size_for(L);
  const int N = grid.n_points();
  ShtPlan plan(grid, L);
  ErrorOperator E(grid, L);
  std::vector<int> perm = E.permutation();

  Eigen::MatrixXd psi = dense_psi(grid, L);
  Eigen::VectorXd w = point_weights(grid);
  Eigen::MatrixXd Edense = psi.transpose() * w.cwiseProduct(w).asDiagonal() * psi;
  Eigen::MatrixXd Einv = Edense.ldlt().solve(Eigen::MatrixXd::Identity(ncoef, ncoef));

  auto dense_block_draw = [&](const Eigen::MatrixXd& B, const Eigen::VectorXd& rhs,
                              const Eigen::VectorXd& z) {
    Eigen::MatrixXd Bp(ncoef, ncoef);
    Eigen::VectorXd rhsp(ncoef), zp(ncoef), out(ncoef);
    for (int r = 0; r < ncoef; ++r) {
      rhsp[r] = rhs[perm[r]];
      zp[r] = z[perm[r]];
      for (int c = 0; c < ncoef; ++c) Bp(r, c) = B(perm[r], perm[c]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Bp);
    Eigen::VectorXd draw = llt.solve(rhsp) + llt.matrixU().solve(zp);
    for (int r = 0; r < ncoef; ++r) out[perm[r]] = draw[r];
    return out;
  };

  // latent-mean update side
  MaternSpec spec{1.0, 5.0, 1.0};
  Eigen::VectorXd d_alpha(ncoef);
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      d_alpha[SpectralCoeffs::index(l, m)] = spectral_density(spec, l);
    }
  }
  ChangepointState st;
  st.M = 6;
  st.mZ = 3.0;
  st.gamma_cap = 9.0;
  st.gammas = thresholds_equal_prob(6, 1.0);
  st.gammas.array() -= st.gammas[0];
  st.tau = Eigen::VectorXi::Constant(N, 6);
  st.Z.resize(N);
  st.alpha = SpectralCoeffs(L);
  st.muZ_field = ScalarField(8);
  st.muZ_field.values.setConstant(3.0);
  for (int i = 0; i < N; ++i) {
    RngStream rs(55, rngtag::kTest, 9, static_cast<std::uint32_t>(i));
    st.Z[i] = 3.0 + rs.normal();
  }

  double worst_alpha = 0.0;
  for (std::uint32_t it = 0; it < 100; ++it) {
    update_muZ(st, E, d_alpha, plan, 1234, it);
    Eigen::VectorXd dev = st.Z.array() - st.mZ;
    Eigen::VectorXd rhs = Einv * (psi.transpose() * (w.asDiagonal() * dev));
    Eigen::MatrixXd B = Einv;
    B.diagonal() += d_alpha.cwiseInverse();
    Eigen::VectorXd z(ncoef);
    for (int c = 0; c < ncoef; ++c) {
      RngStream rs(1234, rngtag::kAlpha, it, static_cast<std::uint32_t>(c));
      z[c] = rs.normal();
    }
    Eigen::VectorXd draw = dense_block_draw(B, rhs, z);
    worst_alpha = std::max(worst_alpha,
                           (st.alpha.values - draw).cwiseAbs().maxCoeff());
  }

  // dynamics update side
  DynamicsParams p = DynamicsParams::separable(0.6, 0.8, 5.0, 1.0);
  DynamicsState dyn;
  dyn.L = L;
  dyn.M_time = M;
  dyn.params = p;
  dyn.Uhat = Eigen::MatrixXd::Zero(ncoef, M + 1);
  Eigen::MatrixXd data(N, M);
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < M; ++t) {
      RngStream rs(3131, rngtag::kTest, static_cast<std::uint32_t>(t),
                   static_cast<std::uint32_t>(i));
      data(i, t) = rs.normal();
    }
  }
  const double sigma2_eps = 0.4;
  Eigen::VectorXd xi(ncoef), eta(ncoef);
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      xi[SpectralCoeffs::index(l, m)] = ar1_coeff(p, l);
      eta[SpectralCoeffs::index(l, m)] = innovation_var(p, l);
    }
  }
  Eigen::MatrixXd beta_ref = Eigen::MatrixXd::Zero(ncoef, M + 1);
  Eigen::MatrixXd u_fields = Eigen::MatrixXd::Zero(N, M + 1);

  double worst_u = 0.0;
  for (std::uint32_t it = 0; it < 100; ++it) {
    update_U(dyn, data, sigma2_eps, E, plan, u_fields, 777, it);
    for (int t = 0; t <= M; ++t) {
      Eigen::VectorXd z(ncoef);
      const std::uint32_t key =
          it * static_cast<std::uint32_t>(M + 1) + static_cast<std::uint32_t>(t);
      for (int c = 0; c < ncoef; ++c) {
        RngStream rs(777, rngtag::kU, key, static_cast<std::uint32_t>(c));
        z[c] = rs.normal();
      }
      if (t == 0) {
        beta_ref.col(0) =
            xi.asDiagonal() * beta_ref.col(1) + eta.cwiseSqrt().asDiagonal() * z;
        continue;
      }
      Eigen::VectorXd fwd = psi.transpose() * (w.asDiagonal() * data.col(t - 1));
      Eigen::VectorXd rhs = (Einv * fwd) / sigma2_eps;
      Eigen::VectorXd d(ncoef);
      if (t < M) {
        rhs += (xi.array() * (beta_ref.col(t + 1) + beta_ref.col(t - 1)).array() /
                eta.array())
                   .matrix();
        d = ((1.0 + xi.array().square()) / eta.array()).matrix();
      } else {
        rhs += (xi.array() * beta_ref.col(M - 1).array() / eta.array()).matrix();
        d = eta.cwiseInverse();
      }
      Eigen::MatrixXd B = Einv / sigma2_eps;
      B.diagonal() += d;
      Eigen::VectorXd draw = dense_block_draw(B, rhs, z);
      beta_ref.col(t) = draw;
    }
    worst_u = std::max(worst_u, (dyn.Uhat - beta_ref).cwiseAbs().maxCoeff());
  }

  detail = "max |alpha - dense| = " + std::to_string(worst_alpha) +
           ", max |U - dense| = " + std::to_string(worst_u);
  return worst_alpha <= 1e-8 && worst_u <= 1e-8;
}

// ---------------------------------------------------------------- criterion 6
bool crit_enumeration(std::string& detail) {
  const int M = 5;
  const double sigma2 = 0.5;
  MeanPriors priors;
  MeanModel mm(MeanModelKind::constant_constant, priors, 1, M);
  mm.set_mu1(0.0);
  mm.set_mu2(1.2);
  Eigen::MatrixXd resid(1, M);
  resid << 0.2, -0.1, 0.9, 1.4, 1.1;
  Eigen::VectorXd y = resid.row(0).transpose();

  Eigen::VectorXd gam = thresholds_equal_prob(M, 0.5);
  gam.array() -= gam[0];
  const double muZ = 0.9;

  // brute-force enumeration of the categorical posterior
  auto enumerate = [&](const Eigen::VectorXd& pi) {
    Eigen::VectorXd logw(M);
    for (int k = 1; k <= M; ++k) {
      double ll = 0.0;
      for (int t = 1; t <= M; ++t) {
        const double mean = (t <= k) ? 0.0 : 1.2;
        ll -= (y[t - 1] - mean) * (y[t - 1] - mean) / (2.0 * sigma2);
      }
      logw[k - 1] = ll + std::log(pi[k - 1]);
    }
    Eigen::VectorXd wv = (logw.array() - logw.maxCoeff()).exp();
    return Eigen::VectorXd(wv / wv.sum());
  };

  Eigen::VectorXd pi_mpm(M);
  for (int k = 1; k <= M; ++k) {
    const double lo = (k == 1) ? -1e30 : gam[k - 2] - muZ;
    const double hi = (k == M) ? 1e30 : gam[k - 1] - muZ;
    pi_mpm[k - 1] = norm_cdf(hi) - norm_cdf(lo);
  }

  const int draws = 100000;
  bool pass = true;
  detail = "";

  {
    ChangepointState st;
    st.M = M;
    st.mZ = muZ;
    st.gamma_cap = 9.0;
    st.gammas = gam;
    st.tau = Eigen::VectorXi::Constant(1, M);
    st.Z = Eigen::VectorXd::Constant(1, gam[M - 2] + 1.0);
    st.muZ_field.K = 0;
    st.muZ_field.values = Eigen::VectorXd::Constant(1, muZ);
    st.alpha = SpectralCoeffs(0);
    Eigen::VectorXd want = enumerate(pi_mpm);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(M);
    for (int it = 0; it < draws; ++it) {
      update_tau(resid, mm, sigma2, st, 11, static_cast<std::uint32_t>(it));
      counts[st.tau[0] - 1] += 1;
    }
    double worst_se = 0.0;
    for (int k = 0; k < M; ++k) {
      const double se = std::sqrt(want[k] * (1.0 - want[k]) / draws) + 1e-12;
      worst_se = std::max(worst_se,
                          std::abs(counts[k] / double(draws) - want[k]) / se);
    }
    pass = pass && worst_se <= 3.0;
    detail += "MPM worst deviation " + std::to_string(worst_se) + " se; ";
  }
  {
    Eigen::VectorXd want = enumerate(Eigen::VectorXd::Constant(M, 1.0 / M));
    Eigen::VectorXi tau(1);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(M);
    for (int it = 0; it < draws; ++it) {
      ind_update_tau(resid, mm, sigma2, M, tau, 12, static_cast<std::uint32_t>(it));
      counts[tau[0] - 1] += 1;
    }
    double worst_se = 0.0;
    for (int k = 0; k < M; ++k) {
      const double se = std::sqrt(want[k] * (1.0 - want[k]) / draws) + 1e-12;
      worst_se = std::max(worst_se,
                          std::abs(counts[k] / double(draws) - want[k]) / se);
    }
    pass = pass && worst_se <= 3.0;
    detail += "IND worst deviation " + std::to_string(worst_se) + " se";
  }
  return pass;
}

// ---------------------------------------------------------------- criterion 7
bool crit_mpm_vs_ind(std::string& detail) {
  const int reps = 20;
  SimConfig sc;
  sc.K = 20;
  sc.M_time = 60;
  sc.generator = CpGenerator::minmax;
  sc.tau_kappa = 3.0;
  sc.delta = 1.0;
  // error process with unit-order field scale and moderate persistence, so
  // changepoints are estimable but the per-location likelihood stays noisy
  sc.U_matern = MaternSpec{37.0, 5.0, 1.0};
  sc.xi = 0.5;
  sc.sigma2_eps = 0.25;
  sc.seed = 2026;

  ModelConfig mc;
  mc.K = sc.K;
  mc.L = sc.K / 2 - 1;
  mc.M_time = sc.M_time;
  // latent-mean prior wide enough to express the marginal shape on the grid
  mc.muZ_matern = MaternSpec{1500.0, 5.0, 1.0};
  mc.U_kappa = sc.U_matern.kappa;
  mc.U_nu = sc.U_matern.nu;
  mc.iterations = 3000;
  mc.burn_in = 500;
  mc.thinning = 5;
  mc.seed = 555;

  DHGrid grid = build_grid(sc.K);
  std::vector<double> rmse_mpm(reps), rmse_ind(reps);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    SimDataset ds = gen_dataset(sc, r);
    Eigen::VectorXd truth = ds.tau.cast<double>();

    ModelConfig m1 = mc;
    m1.use_mpm = true;
    Chain c1(m1, ds.Y);
    rmse_mpm[r] = g_rmse(truth, c1.run().tau_mean, grid);

    ModelConfig m2 = mc;
    m2.use_mpm = false;
    Chain c2(m2, ds.Y);
    rmse_ind[r] = g_rmse(truth, c2.run().tau_mean, grid);
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  int wins = 0;
  for (int r = 0; r < reps; ++r) wins += (rmse_mpm[r] < rmse_ind[r]);
  const double med_mpm = median(rmse_mpm), med_ind = median(rmse_ind);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "median g-RMSE: MPM %.4f vs IND %.4f; MPM wins %d/%d", med_mpm,
                med_ind, wins, reps);
  detail = buf;
  return med_mpm < med_ind && wins >= static_cast<int>(0.7 * reps);
}

// ---------------------------------------------------------------- criterion 8
bool crit_trunc_decay(std::string& detail) {
  const int reps = 8;
  const std::vector<int> levels = {4, 9, 14, 19};

  SimConfig sc;
  sc.K = 40;
  sc.M_time = 60;
  sc.generator = CpGenerator::cdf;
  sc.tau_kappa = 100.0;
  sc.delta = 1.5;
  sc.U_matern = MaternSpec{80.0, 5.0, 1.0};
  sc.xi = 0.5;
  sc.sigma2_eps = 0.25;
  sc.seed = 919;

  ModelConfig mc;
  mc.K = sc.K;
  mc.M_time = sc.M_time;
  mc.L = 19;
  mc.U_kappa = sc.U_matern.kappa;
  mc.U_nu = sc.U_matern.nu;
  mc.iterations = 800;
  mc.burn_in = 200;
  mc.thinning = 2;
  mc.seed = 233;

  Eigen::MatrixXd rmse(reps, static_cast<int>(levels.size()));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    SimDataset ds = gen_dataset(sc, r);
    CoupledResult res = run_coupled(mc, ds.Y, ds.tau.cast<double>(), levels);
    for (std::size_t j = 0; j < levels.size(); ++j) {
      rmse(r, static_cast<int>(j)) = res.g_rmse[j];
    }
  }

  Eigen::VectorXd mean = rmse.colwise().mean();
  Eigen::VectorXd se(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double v =
        (rmse.col(static_cast<int>(j)).array() - mean[static_cast<int>(j)])
            .square()
            .sum() /
        (reps - 1);
    se[static_cast<int>(j)] = std::sqrt(v / reps);
  }

  // monotone non-increasing up to one inversion smaller than 2 se of the
  // paired difference
  int inversions = 0;
  bool small_inversions = true;
  for (std::size_t j = 1; j < levels.size(); ++j) {
    const double diff = mean[static_cast<int>(j)] - mean[static_cast<int>(j - 1)];
    if (diff > 0.0) {
      ++inversions;
      Eigen::VectorXd d = rmse.col(static_cast<int>(j)) - rmse.col(static_cast<int>(j - 1));
      const double dse = std::sqrt(
          (d.array() - d.mean()).square().sum() / (reps - 1) / reps);
      if (diff >= 2.0 * dse) small_inversions = false;
    }
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    pts.push_back({static_cast<double>(levels[j]), mean[static_cast<int>(j)]});
  }
  ExpDecayFit fit = fit_exp_decay(pts);
  const double fitted_at_19 = fit.a * std::exp(-fit.b * 19.0) + fit.c;
  const bool fit_ok = fit.b > 0.0 &&
                      std::abs(fitted_at_19 - mean[3]) <= 2.0 * se[3];

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "mean g-RMSE %.4f %.4f %.4f %.4f (se %.4f); fit b=%.4f "
                "fitted(19)=%.4f; inversions=%d",
                mean[0], mean[1], mean[2], mean[3], se[3], fit.b, fitted_at_19,
                inversions);
  detail = buf;
  return inversions <= 1 && small_inversions && fit_ok;
}

// ---------------------------------------------------------------- criterion 9
bool crit_perf_ratio(std::string& detail) {
  SimConfig sc;
  sc.K = 40;
  sc.M_time = 60;
  sc.delta = 1.5;
  sc.seed = 7;
  SimDataset ds = gen_dataset(sc, 0);

  ModelConfig mc;
  mc.K = sc.K;
  mc.L = sc.K / 2 - 1;
  mc.M_time = sc.M_time;
  mc.iterations = 100;
  mc.burn_in = 10;
  mc.seed = 7;

  Chain chain(mc, ds.Y);
  chain.step();
  chain.step();
  auto t0 = std::chrono::steady_clock::now();
  const int n_spec = 50;
  for (int i = 0; i < n_spec; ++i) chain.step();
  auto t1 = std::chrono::steady_clock::now();
  const double spectral_s =
      std::chrono::duration<double>(t1 - t0).count() / n_spec;

  DenseMpmChain dense(mc, ds.Y, 20000);
  dense.step();
  auto d0 = std::chrono::steady_clock::now();
  const int n_dense = 3;
  for (int i = 0; i < n_dense; ++i) dense.step();
  auto d1 = std::chrono::steady_clock::now();
  const double dense_s = std::chrono::duration<double>(d1 - d0).count() / n_dense;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "N=3200: spectral %.4f s/iter, dense %.3f s/iter, ratio %.0fx",
                spectral_s, dense_s, dense_s / spectral_s);
  detail = buf;
  return dense_s / spectral_s >= 50.0;
}

// --------------------------------------------------------------- criterion 10
bool crit_csep(std::string& detail) {
  Eigen::VectorXd u_grid(40), h_grid(11);
  for (int i = 0; i < 40; ++i) u_grid[i] = kPi * i / 39.0;
  for (int i = 0; i < 11; ++i) h_grid[i] = i;
  const int L = 50;

  auto make = [&](double xi_d) {
    DynamicsParams p;
    p.mode = (xi_d == 0.0) ? DynamicsMode::separable : DynamicsMode::nonseparable;
    p.xi_r = 0.5;
    p.xi_d = xi_d;
    p.matern = MaternSpec{1.0, 5.0, 1.0};
    return p;
  };
  const double c0 = csep(make(0.0), u_grid, h_grid, L);
  const double c_mid = csep(make(0.5), u_grid, h_grid, L);
  const double c_huge = csep(make(1e6), u_grid, h_grid, L);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "c_sep: %.2e at xi_d=0, %.4f at xi_d=0.5, %.2e at xi_d=1e6", c0,
                c_mid, c_huge);
  detail = buf;
  return c0 <= 1e-12 && c_huge < 1e-3 && c_mid > 1e-6 && c_mid > c_huge;
}

// --------------------------------------------------------------- criterion 11
bool crit_dynamics(std::string& detail) {
  // algebraic stationary identity at 20 parameter points
  int checked = 0;
  for (double xi_r : {0.1, 0.5, 1.3, 2.0}) {
    for (double xi_d : {0.0, 0.05, 0.4, 1.0, 5.0}) {
      DynamicsParams q = DynamicsParams::nonseparable(xi_r, xi_d, 1.7, 3.0, 1.5);
      const int l = checked % 6;
      const double want = spectral_density(q.matern, l) / (2.0 * q.rate(l));
      if (std::abs(stationary_var(q, l) - want) > 1e-10 * want) {
        detail = "stationary identity failed";
        return false;
      }
      ++checked;
    }
  }

  // lag-1 autocorrelation Monte Carlo at two parameter points
  for (int pt = 0; pt < 2; ++pt) {
    DynamicsParams p = (pt == 0)
                           ? DynamicsParams::nonseparable(0.4, 0.02, 1.0, 5.0, 1.0)
                           : DynamicsParams::separable(0.8, 1.0, 5.0, 1.0);
    const int steps = 50000;
    DynamicsState st = sample_prior_path(p, 1, steps, 5 + pt, 0);
    const int idx = SpectralCoeffs::index(1, 0);
    double s01 = 0.0, s00 = 0.0;
    for (int t = 1; t <= steps; ++t) {
      s01 += st.Uhat(idx, t) * st.Uhat(idx, t - 1);
      s00 += st.Uhat(idx, t - 1) * st.Uhat(idx, t - 1);
    }
    const double rho = s01 / s00;
    const double want = ar1_coeff(p, 1);
    const double se = std::sqrt((1.0 - want * want) / steps);
    if (std::abs(rho - want) > 3.0 * se) {
      detail = "lag-1 autocorrelation outside 3 se";
      return false;
    }
  }
  detail = "20 algebraic identity points at 1e-10; lag-1 MC within 3 se";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "quadrature exactness", 10, crit_quadrature},
      {2, "transform roundtrip", 30, crit_roundtrip},
      {3, "error-operator census", 10, crit_census},
      {4, "truncation bound table", 300, crit_table_b1},
      {5, "dense-oracle Gibbs equivalence", 120, crit_gibbs_oracle},
      {6, "enumeration-oracle posterior", 60, crit_enumeration},
      {7, "MPM vs IND ordering", 2700, crit_mpm_vs_ind},
      {8, "truncation decay", 3600, crit_trunc_decay},
      {9, "spectral vs dense runtime", 1800, crit_perf_ratio},
      {10, "separability diagnostic", 60, crit_csep},
      {11, "dynamics identities", 120, crit_dynamics},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    if (!in_budget) ok = false;
    std::printf("%s criterion %2d [%s] %.1fs (budget %.0fs)%s\n    %s\n",
                ok ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                in_budget ? "" : " OVER BUDGET", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
