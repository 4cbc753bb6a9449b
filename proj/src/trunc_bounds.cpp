#include "sphcp/trunc_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "sphcp/errors.hpp"
#include "sphcp/grf.hpp"
#include "sphcp/quadrature.hpp"
#include "sphcp/rng.hpp"
#include "sphcp/stats.hpp"

namespace sphcp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral_mass(double kappa, double expo, int L) {
  double s = 0.0;
  for (int l = 0; l <= L; ++l) {
    s += (2.0 * l + 1.0) * std::pow(kappa * kappa + static_cast<double>(l) * (l + 1), expo);
  }
  return s;
}
}  // namespace

double sigma_z_from_vz(double vZ, double kappa, double nu, int L) {
  return std::sqrt(vZ / spectral_mass(kappa, -(nu + 1.0), L));
}

double sigma_z_from_vz_literal(double vZ, double kappa, double nu, int L) {
  return std::sqrt(vZ / spectral_mass(kappa, -nu + 1.0, L));
}

Eigen::VectorXd thresholds_equal_prob(int M, double vZ) {
  if (M < 2) throw std::invalid_argument("thresholds_equal_prob: M must be >= 2");
  if (vZ < 0.0) throw std::invalid_argument("thresholds_equal_prob: vZ must be >= 0");
  const double s = std::sqrt(vZ + 1.0);
  Eigen::VectorXd g(M - 1);
  for (int k = 1; k < M; ++k) {
    g[k - 1] = s * norm_quantile(static_cast<double>(k) / M);
  }
  return g;
}

Eigen::VectorXd thresholds_equal_dist(int M, double vZ, double kappa, double nu,
                                      int L, int K_sim, int n_reps,
                                      std::uint64_t seed) {
  if (M < 2) throw std::invalid_argument("thresholds_equal_dist: M must be >= 2");
  if (K_sim / 2 - 1 < L) {
    throw std::invalid_argument("thresholds_equal_dist: K_sim too small for L");
  }
  MaternSpec spec;
  spec.kappa = kappa;
  spec.nu = nu;
  const double sz = sigma_z_from_vz(vZ, kappa, nu, L);
  spec.sigma2 = sz * sz;

  DHGrid grid = build_grid(K_sim);
  ShtPlan plan(grid, L);
  double sum_spread = 0.0;
  for (int rep = 0; rep < n_reps; ++rep) {
    GrfDraw draw = sample_grf(spec, L, plan, seed, rngtag::kSim,
                              static_cast<std::uint32_t>(rep));
    double mx = 0.0;
    for (int idx = 0; idx < draw.field.size(); ++idx) {
      RngStream rs(seed, rngtag::kZ, static_cast<std::uint32_t>(rep),
                   static_cast<std::uint32_t>(idx));
      mx = std::max(mx, std::abs(draw.field.values[idx] + rs.normal()));
    }
    sum_spread += mx;
  }
  const double B = sum_spread / n_reps;

  Eigen::VectorXd g(M - 1);
  for (int k = 1; k < M; ++k) g[k - 1] = -B + k * (2.0 * B / M);
  return g;
}

TruncBoundInput make_trunc_bound_input(int M, const Eigen::VectorXd& gammas,
                                       double vZ, double kappa, double nu, int L) {
  if (gammas.size() != M - 1) {
    throw std::invalid_argument("TruncBoundInput: need M-1 thresholds");
  }
  for (int i = 1; i < gammas.size(); ++i) {
    if (!(gammas[i] > gammas[i - 1])) {
      throw std::invalid_argument("TruncBoundInput: thresholds must increase");
    }
  }
  if (!(nu > 0.5)) throw std::invalid_argument("TruncBoundInput: requires nu > 1/2");
  if (L < 1) throw std::invalid_argument("TruncBoundInput: requires L >= 1");
  TruncBoundInput in;
  in.M = M;
  in.gammas = gammas;
  in.vZ = vZ;
  in.kappa = kappa;
  in.nu = nu;
  in.L = L;
  in.sigmaZ = sigma_z_from_vz(vZ, kappa, nu, L);
  return in;
}

double cp_agreement_bound(const TruncBoundInput& in, int a) {
  if (a < 0 || a >= in.M) {
    throw std::invalid_argument("cp_agreement_bound: a out of range");
  }
  const int M = in.M;
  const double s = std::sqrt(in.vZ + 1.0);
  const double sdev = in.sigmaZ * std::pow(static_cast<double>(in.L), -in.nu) *
                      std::sqrt(1.0 / in.nu + 1.0 / (in.L * (2.0 * in.nu + 1.0)));

  auto gamma_at = [&](int idx) -> double {
    if (idx <= 0) return -kInf;
    if (idx >= M) return kInf;
    return in.gammas[idx - 1];
  };

  // integration cutoff for the unbounded outer bins; neglected mass < 1e-17
  const double z_cut = 8.5 * s;

  double total = 0.0;
  for (int k = 1; k <= M; ++k) {
    const double bin_lo = gamma_at(k - 1), bin_hi = gamma_at(k);
    const double hi = gamma_at(std::min(k + a, M));
    const double lo = gamma_at(std::max(k - a - 1, 0));

    if (std::isinf(hi) && std::isinf(lo)) {
      // Delta is +inf across the bin; the term is exactly the bin probability
      const double u0 = std::isinf(bin_lo) ? 0.0 : norm_cdf(bin_lo / s);
      const double u1 = std::isinf(bin_hi) ? 1.0 : norm_cdf(bin_hi / s);
      total += u1 - u0;
      continue;
    }

    const double zlo = std::isinf(bin_lo) ? -z_cut : bin_lo;
    const double zhi = std::isinf(bin_hi) ? z_cut : bin_hi;
    if (zhi <= zlo) continue;

    auto integrand = [&](double z) {
      double delta = kInf;
      if (!std::isinf(hi)) delta = hi - z;
      if (!std::isinf(lo)) delta = std::min(delta, z - lo);
      const double g = std::isinf(delta) ? 1.0 : (2.0 * norm_cdf(delta / sdev) - 1.0);
      return g * norm_pdf(z / s) / s;
    };

    // knots isolating the O(sdev)-wide layers where the agreement probability
    // transitions, so the adaptive rule cannot step over them
    std::set<double> knots{zlo, zhi};
    auto add_layer = [&](double edge) {
      if (std::isinf(edge)) return;
      for (double r : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        for (double sign : {-1.0, 1.0}) {
          const double z = edge + sign * r * sdev;
          if (z > zlo && z < zhi) knots.insert(z);
        }
      }
    };
    add_layer(hi);
    add_layer(lo);
    if (!std::isinf(hi) && !std::isinf(lo)) {
      const double mid = 0.5 * (hi + lo);
      if (mid > zlo && mid < zhi) knots.insert(mid);
    }

    std::vector<double> kv(knots.begin(), knots.end());
    const double piece_tol = 1e-9 / static_cast<double>(kv.size());
    for (std::size_t i = 0; i + 1 < kv.size(); ++i) {
      total += integrate_gk(integrand, kv[i], kv[i + 1], piece_tol);
    }
  }
  return std::min(1.0, std::max(0.0, total));
}

double expected_mae_bound(const TruncBoundInput& in) {
  double sum = 0.0;
  for (int a = 0; a < in.M; ++a) sum += cp_agreement_bound(in, a);
  const double mae = (in.M - 1.0) - sum;
  return std::min(static_cast<double>(in.M - 1), std::max(0.0, mae));
}

}  // namespace sphcp
