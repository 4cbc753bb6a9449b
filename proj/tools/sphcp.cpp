// Command-line interface: simulation, fitting, transforms, bound tables,
// coupled truncation studies, separability diagnostics and benchmarks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphcp/chain.hpp"
#include "sphcp/stats.hpp"
#include "sphcp/dense_oracle.hpp"
#include "sphcp/dynamics.hpp"
#include "sphcp/errors.hpp"
#include "sphcp/io.hpp"
#include "sphcp/sht.hpp"
#include "sphcp/sim.hpp"
#include "sphcp/trunc_bounds.hpp"

namespace fs = std::filesystem;
using namespace sphcp;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw config_error("expected a comma-separated integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw config_error("expected a comma-separated number list");
  return out;
}

SimConfig read_sim_config(ConfigReader& cfg) {
  SimConfig sc;
  sc.K = static_cast<int>(cfg.get_int("K"));
  sc.M_time = static_cast<int>(cfg.get_int("M_time", 60));
  const std::string gen = cfg.get_string("generator", "minmax");
  if (gen == "minmax") {
    sc.generator = CpGenerator::minmax;
  } else if (gen == "cdf") {
    sc.generator = CpGenerator::cdf;
  } else {
    throw config_error("generator must be minmax or cdf");
  }
  sc.tau_kappa = cfg.get_double("tau_kappa", 5.0);
  sc.tau_nu = cfg.get_double("tau_nu", 1.0);
  sc.mu1 = cfg.get_double("mu1", 0.0);
  sc.delta = cfg.get_double("delta", 1.5);
  sc.U_matern.sigma2 = cfg.get_double("U_sigma2", 1.0);
  sc.U_matern.kappa = cfg.get_double("U_kappa", 5.0);
  sc.U_matern.nu = cfg.get_double("U_nu", 1.0);
  sc.xi = cfg.get_double("xi", 0.7);
  sc.sigma2_eps = cfg.get_double("sigma2_eps", 0.25);
  sc.n_replicates = static_cast<int>(cfg.get_int("replicates", 1));
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  return sc;
}

ModelConfig read_model_config(ConfigReader& cfg) {
  ModelConfig mc;
  mc.K = static_cast<int>(cfg.get_int("K"));
  mc.L = static_cast<int>(cfg.get_int("L"));
  mc.M_time = static_cast<int>(cfg.get_int("M_time"));
  const std::string prior = cfg.get_string("prior", "mpm");
  if (prior == "mpm") {
    mc.use_mpm = true;
  } else if (prior == "ind") {
    mc.use_mpm = false;
  } else {
    throw config_error("prior must be mpm or ind");
  }
  const std::string mean = cfg.get_string("mean_model", "cc");
  if (mean == "cc") {
    mc.mean_model = MeanModelKind::constant_constant;
  } else if (mean == "cl") {
    mc.mean_model = MeanModelKind::constant_linear;
  } else {
    throw config_error("mean_model must be cc or cl");
  }
  mc.m_Z = cfg.get_double("m_Z", 3.0);
  mc.gamma_cap_offset = cfg.get_double("gamma_cap_offset", 6.0);
  mc.muZ_matern.sigma2 = cfg.get_double("muZ_sigma2", 1.0);
  mc.muZ_matern.kappa = cfg.get_double("muZ_kappa", 5.0);
  mc.muZ_matern.nu = cfg.get_double("muZ_nu", 1.0);
  mc.U_kappa = cfg.get_double("U_kappa", 5.0);
  mc.U_nu = cfg.get_double("U_nu", 1.0);
  mc.sigma_eps_prior_shape = cfg.get_double("sigma_eps_prior_shape", 0.01);
  mc.sigma_eps_prior_scale = cfg.get_double("sigma_eps_prior_scale", 0.01);
  mc.sigma_U_prior_shape = cfg.get_double("sigma_U_prior_shape", 0.01);
  mc.sigma_U_prior_scale = cfg.get_double("sigma_U_prior_scale", 0.01);
  mc.mean_priors.mu1_mean = cfg.get_double("mu1_prior_mean", 0.0);
  mc.mean_priors.mu1_var = cfg.get_double("mu1_prior_var", 100.0);
  mc.mean_priors.mu2_mean = cfg.get_double("mu2_prior_mean", 0.0);
  mc.mean_priors.mu2_var = cfg.get_double("mu2_prior_var", 100.0);
  mc.mean_priors.beta1_mean = cfg.get_double("beta1_prior_mean", 0.0);
  mc.mean_priors.beta1_var = cfg.get_double("beta1_prior_var", 100.0);
  mc.mean_priors.beta2_mean = cfg.get_double("beta2_prior_mean", 0.0);
  mc.mean_priors.beta2_var = cfg.get_double("beta2_prior_var", 100.0);
  mc.iterations = static_cast<int>(cfg.get_int("iterations"));
  mc.burn_in = static_cast<int>(cfg.get_int("burn_in"));
  mc.thinning = static_cast<int>(cfg.get_int("thinning", 1));
  mc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  mc.archive_fields = cfg.get_bool("archive_fields", false);
  mc.coupling = cfg.get_bool("coupling", false);
  return mc;
}

std::string rep_name(const std::string& stem, int rep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rep%03d_%s", rep, stem.c_str());
  return buf;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  ConfigReader cfg(config_path);
  SimConfig sc = read_sim_config(cfg);
  cfg.finish();
  fs::create_directories(out_dir);
  for (int rep = 0; rep < sc.n_replicates; ++rep) {
    SimDataset ds = gen_dataset(sc, rep);
    write_sfld(out_dir + "/" + rep_name("Y.sfld", rep), sc.K, ds.Y);
    write_sfld(out_dir + "/" + rep_name("tau.sfld", rep), sc.K,
               ds.tau.cast<double>());
    std::cout << "replicate " << rep << ": N=" << ds.Y.rows()
              << " M=" << ds.Y.cols() << "\n";
  }
  std::ofstream manifest(out_dir + "/sim_manifest.txt");
  manifest << "K=" << sc.K << "\nM_time=" << sc.M_time << "\nreplicates="
           << sc.n_replicates << "\nseed=" << sc.seed << "\ndelta=" << sc.delta
           << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& data_dir,
            const std::string& out_dir, const std::string& prior_override,
            int replicate) {
  ConfigReader cfg(config_path);
  ModelConfig mc = read_model_config(cfg);
  cfg.finish();
  if (prior_override == "mpm") mc.use_mpm = true;
  if (prior_override == "ind") mc.use_mpm = false;

  int K = 0;
  Eigen::MatrixXd Y = read_sfld(data_dir + "/" + rep_name("Y.sfld", replicate), &K);
  if (K != mc.K) throw config_error("fit: config K does not match the data file");

  fs::create_directories(out_dir);
  Chain chain(mc, Y);
  PosteriorSummary s = chain.run(out_dir);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < s.tau_mean.size(); ++i) {
    rows.push_back({static_cast<double>(i), s.tau_mean[i],
                    static_cast<double>(s.tau_mode[i]), s.tau_mode_prob[i],
                    static_cast<double>(s.changepoint_flag[i])});
  }
  write_csv(out_dir + "/tau_summary.csv",
            {"location", "tau_mean", "tau_mode", "mode_prob", "changepoint"}, rows);
  write_sfld(out_dir + "/tau_mean.sfld", mc.K, s.tau_mean);
  std::cout << "samples=" << s.n_samples << " waic=" << s.waic << "\n";
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path) {
  int K1 = 0, K2 = 0;
  Eigen::MatrixXd truth = read_sfld(truth_path, &K1);
  Eigen::MatrixXd est = read_sfld(est_path, &K2);
  if (K1 != K2) throw config_error("evaluate: grids differ");
  DHGrid grid = build_grid(K1);
  const double v = g_rmse(truth.col(0), est.col(0), grid);
  std::cout << "g_rmse=" << v << "\n";
  return 0;
}

int cmd_sht(const std::string& dir, const std::string& in_path,
            const std::string& out_path, int L, int K_override) {
  if (dir == "forward") {
    int K = 0;
    Eigen::MatrixXd fields = read_sfld(in_path, &K);
    DHGrid grid = build_grid(K);
    if (L < 0) L = grid.Lmax();
    ShtPlan plan(grid, L);
    Eigen::MatrixXd coefs(SpectralCoeffs::size_for(L), fields.cols());
    ScalarField f(K);
    for (Eigen::Index t = 0; t < fields.cols(); ++t) {
      f.values = fields.col(t);
      coefs.col(t) = plan.forward(f).values;
    }
    write_scof(out_path, L, coefs);
  } else if (dir == "inverse") {
    int L_in = 0;
    Eigen::MatrixXd coefs = read_scof(in_path, &L_in);
    const int K = (K_override > 0) ? K_override : 2 * (L_in + 1);
    DHGrid grid = build_grid(K);
    ShtPlan plan(grid, L_in);
    Eigen::MatrixXd fields(grid.n_points(), coefs.cols());
    SpectralCoeffs a(L_in);
    for (Eigen::Index t = 0; t < coefs.cols(); ++t) {
      a.values = coefs.col(t);
      fields.col(t) = plan.inverse(a).values;
    }
    write_sfld(out_path, K, fields);
  } else {
    throw config_error("sht direction must be forward or inverse");
  }
  return 0;
}

int cmd_bounds(const std::string& scenario, const std::string& out_path,
               const std::string& m_list, const std::string& vz_list,
               const std::string& nu_list, const std::string& kappa_list,
               int L, int sim_K, int sim_reps) {
  std::vector<std::vector<double>> rows;
  if (scenario == "equal-prob") {
    for (int M : parse_int_list(m_list)) {
      for (double vZ : parse_double_list(vz_list)) {
        for (double kappa : parse_double_list(kappa_list)) {
          for (double nu : parse_double_list(nu_list)) {
            auto in = make_trunc_bound_input(M, thresholds_equal_prob(M, vZ), vZ,
                                             kappa, nu, L);
            rows.push_back({static_cast<double>(M), static_cast<double>(M), vZ,
                            kappa, nu, expected_mae_bound(in)});
          }
        }
      }
    }
  } else if (scenario == "equal-dist") {
    for (int M : parse_int_list(m_list)) {
      for (double vZ : parse_double_list(vz_list)) {
        for (double kappa : parse_double_list(kappa_list)) {
          for (double nu : parse_double_list(nu_list)) {
            auto g = thresholds_equal_dist(M, vZ, kappa, nu, L, sim_K, sim_reps, 1234);
            auto in = make_trunc_bound_input(M, g, vZ, kappa, nu, L);
            rows.push_back({static_cast<double>(M), static_cast<double>(M), vZ,
                            kappa, nu, expected_mae_bound(in)});
          }
        }
      }
    }
  } else {
    throw config_error("bounds scenario must be equal-prob or equal-dist");
  }
  write_csv(out_path, {"M", "observed_categories", "v_Z", "kappa", "nu", "MAE"}, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return 0;
}

int cmd_coupled(const std::string& levels_str, const std::string& config_path,
                const std::string& out_path) {
  ConfigReader cfg(config_path);
  SimConfig sc = read_sim_config(cfg);
  ModelConfig mc;
  mc.K = sc.K;
  mc.M_time = sc.M_time;
  mc.L = static_cast<int>(cfg.get_int("L", sc.K / 2 - 1));
  mc.U_kappa = sc.U_matern.kappa;
  mc.U_nu = sc.U_matern.nu;
  mc.iterations = static_cast<int>(cfg.get_int("iterations"));
  mc.burn_in = static_cast<int>(cfg.get_int("burn_in"));
  mc.thinning = static_cast<int>(cfg.get_int("thinning", 1));
  mc.seed = sc.seed;
  cfg.finish();

  const std::vector<int> levels = parse_int_list(levels_str);
  DHGrid grid = build_grid(sc.K);

  std::vector<double> mean_rmse(levels.size(), 0.0), m2(levels.size(), 0.0);
  for (int rep = 0; rep < sc.n_replicates; ++rep) {
    SimDataset ds = gen_dataset(sc, rep);
    CoupledResult res = run_coupled(mc, ds.Y, ds.tau.cast<double>(), levels);
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const double d = res.g_rmse[j] - mean_rmse[j];
      mean_rmse[j] += d / (rep + 1);
      m2[j] += d * (res.g_rmse[j] - mean_rmse[j]);
    }
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    pts.push_back({static_cast<double>(levels[j]), mean_rmse[j]});
  }
  ExpDecayFit fit = fit_exp_decay(pts);

  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double se = (sc.n_replicates > 1)
                          ? std::sqrt(m2[j] / (sc.n_replicates - 1) / sc.n_replicates)
                          : 0.0;
    rows.push_back({static_cast<double>(levels[j]), mean_rmse[j], se, fit.a, fit.b,
                    fit.c});
  }
  write_csv(out_path, {"L", "g_rmse", "se", "fit_a", "fit_b", "fit_c"}, rows);
  std::cout << "fit: a=" << fit.a << " b=" << fit.b << " c=" << fit.c << "\n";
  return 0;
}

int cmd_csep(const std::string& params_path, const std::string& out_path) {
  ConfigReader cfg(params_path);
  const double xi_r = cfg.get_double("xi_r", 0.5);
  const double sigma2 = cfg.get_double("sigma2", 1.0);
  const double kappa = cfg.get_double("kappa", 5.0);
  const double nu = cfg.get_double("nu", 1.0);
  const int L = static_cast<int>(cfg.get_int("L", 50));
  const int u_points = static_cast<int>(cfg.get_int("u_points", 40));
  const double h_max = cfg.get_double("h_max", 10.0);
  const int h_points = static_cast<int>(cfg.get_int("h_points", 11));
  std::vector<double> xi_d_list = parse_double_list(cfg.get_string("xi_d_list"));
  cfg.finish();

  Eigen::VectorXd u_grid(u_points), h_grid(h_points);
  for (int i = 0; i < u_points; ++i) u_grid[i] = kPi * i / (u_points - 1);
  for (int i = 0; i < h_points; ++i) h_grid[i] = h_max * i / (h_points - 1);

  std::vector<std::vector<double>> rows;
  for (double xi_d : xi_d_list) {
    DynamicsParams p;
    p.mode = (xi_d == 0.0) ? DynamicsMode::separable : DynamicsMode::nonseparable;
    p.xi_r = xi_r;
    p.xi_d = xi_d;
    p.matern = MaternSpec{sigma2, kappa, nu};
    rows.push_back({xi_d, csep(p, u_grid, h_grid, L)});
  }
  write_csv(out_path, {"xi_d", "c_sep"}, rows);
  return 0;
}

int cmd_bench(const std::string& sizes_str, int iters_spectral, int iters_dense) {
  const std::vector<int> sizes = parse_int_list(sizes_str);
  std::printf("%8s %4s %8s %14s %14s %10s\n", "N", "L", "basis", "spectral_s",
              "dense_s", "ratio");
  for (int N : sizes) {
    const int K = static_cast<int>(std::lround(std::sqrt(N / 2.0)));
    if (2 * K * K != N || K % 2 != 0) {
      throw config_error("bench: N must equal 2K^2 for an even K, got " +
                         std::to_string(N));
    }
    const int L = K / 2 - 1;

    SimConfig sc;
    sc.K = K;
    sc.M_time = 60;
    sc.delta = 1.5;
    sc.seed = 7;
    SimDataset ds = gen_dataset(sc, 0);

    ModelConfig mc;
    mc.K = K;
    mc.L = L;
    mc.M_time = sc.M_time;
    mc.iterations = iters_spectral + 2;
    mc.burn_in = 1;
    mc.seed = 7;

    Chain chain(mc, ds.Y);
    chain.step();
    chain.step();  // warm up
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters_spectral; ++i) chain.step();
    auto t1 = std::chrono::steady_clock::now();
    const double spectral_s =
        std::chrono::duration<double>(t1 - t0).count() / iters_spectral;

    if (N <= 3200) {
      DenseMpmChain dense(mc, ds.Y, 20000);
      dense.step();
      auto d0 = std::chrono::steady_clock::now();
      for (int i = 0; i < iters_dense; ++i) dense.step();
      auto d1 = std::chrono::steady_clock::now();
      const double dense_s =
          std::chrono::duration<double>(d1 - d0).count() / iters_dense;
      std::printf("%8d %4d %8d %14.4f %14.4f %10.1f\n", N, L, (L + 1) * (L + 1),
                  spectral_s, dense_s, dense_s / spectral_s);
    } else {
      std::printf("%8d %4d %8d %14.4f %14s %10s\n", N, L, (L + 1) * (L + 1),
                  spectral_s, "-", "-");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian spatially varying changepoint detection on the sphere"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, in_path, truth_path, est_path;
  std::string prior_override, direction, scenario = "equal-prob", levels, sizes;
  std::string params_path;
  std::string m_list = "10,50,100", vz_list = "1,5,10", nu_list = "1,2,3";
  std::string kappa_list = "5";
  int L = -1, K_override = 0, replicate = 0, sim_K = 64, sim_reps = 100;
  int iters_spectral = 50, iters_dense = 3;
  int bounds_L = 89;

  auto* sim = app.add_subcommand("simulate", "generate synthetic datasets");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--out", out_path)->required();

  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler on a dataset");
  fit->add_option("--config", config_path)->required();
  fit->add_option("--data", data_dir)->required();
  fit->add_option("--out", out_path)->required();
  fit->add_option("--prior", prior_override)->check(CLI::IsMember({"mpm", "ind"}));
  fit->add_option("--replicate", replicate);

  auto* ev = app.add_subcommand("evaluate", "g-RMSE between truth and estimate");
  ev->add_option("--truth", truth_path)->required();
  ev->add_option("--estimate", est_path)->required();

  auto* sht = app.add_subcommand("sht", "spherical harmonic transforms");
  sht->add_option("direction", direction)->required()
      ->check(CLI::IsMember({"forward", "inverse"}));
  sht->add_option("--in", in_path)->required();
  sht->add_option("--out", out_path)->required();
  sht->add_option("--L", L);
  sht->add_option("--K", K_override);

  auto* bounds = app.add_subcommand("bounds", "truncation-error bound tables");
  bounds->add_option("--scenario", scenario)
      ->check(CLI::IsMember({"equal-prob", "equal-dist"}));
  bounds->add_option("--out", out_path)->required();
  bounds->add_option("--M-list", m_list);
  bounds->add_option("--vz-list", vz_list);
  bounds->add_option("--nu-list", nu_list);
  bounds->add_option("--kappa-list", kappa_list);
  bounds->add_option("--L", bounds_L);
  bounds->add_option("--sim-K", sim_K);
  bounds->add_option("--sim-reps", sim_reps);

  auto* coup = app.add_subcommand("coupled", "coupled chains across degrees");
  coup->add_option("--levels", levels)->required();
  coup->add_option("--config", config_path)->required();
  coup->add_option("--out", out_path)->required();

  auto* cs = app.add_subcommand("csep", "non-separability diagnostic");
  cs->add_option("--params", params_path)->required();
  cs->add_option("--out", out_path)->required();

  auto* bench = app.add_subcommand("bench", "spectral vs dense per-iteration time");
  bench->add_option("--sizes", sizes)->required();
  bench->add_option("--iters-spectral", iters_spectral);
  bench->add_option("--iters-dense", iters_dense);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_path);
    if (fit->parsed()) return cmd_fit(config_path, data_dir, out_path,
                                      prior_override, replicate);
    if (ev->parsed()) return cmd_evaluate(truth_path, est_path);
    if (sht->parsed()) return cmd_sht(direction, in_path, out_path, L, K_override);
    if (bounds->parsed()) {
      return cmd_bounds(scenario, out_path, m_list, vz_list, nu_list, kappa_list,
                        bounds_L, sim_K, sim_reps);
    }
    if (coup->parsed()) return cmd_coupled(levels, config_path, out_path);
    if (cs->parsed()) return cmd_csep(params_path, out_path);
    if (bench->parsed()) return cmd_bench(sizes, iters_spectral, iters_dense);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "io failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
