#include "sphcp/changepoint.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "sphcp/errors.hpp"
#include "sphcp/stats.hpp"

namespace sphcp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Inverse-CDF draw from an unnormalized log-weight categorical: one uniform,
// smallest index wins exact ties.
int categorical_from_logw(const Eigen::VectorXd& logw, double u) {
  const double mx = logw.maxCoeff();
  double total = 0.0;
  Eigen::VectorXd w(logw.size());
  for (int k = 0; k < logw.size(); ++k) {
    w[k] = std::exp(logw[k] - mx);
    total += w[k];
  }
  const double target = u * total;
  double cum = 0.0;
  for (int k = 0; k < w.size(); ++k) {
    cum += w[k];
    if (target <= cum) return k;
  }
  return static_cast<int>(w.size()) - 1;
}
}  // namespace

double ChangepointState::gamma_at(int idx) const {
  if (idx <= 0) return -kInf;
  if (idx >= M) return kInf;
  return gammas[idx - 1];
}

void ChangepointState::check_consistent() const {
  for (int i = 1; i < gammas.size(); ++i) {
    if (!(gammas[i] > gammas[i - 1])) {
      throw numerical_error("ChangepointState: thresholds not increasing");
    }
  }
  if (gammas.size() > 0 && gammas[0] != 0.0) {
    throw numerical_error("ChangepointState: gamma_1 must be 0");
  }
  for (int i = 0; i < tau.size(); ++i) {
    const int k = tau[i];
    if (k < 1 || k > M) throw numerical_error("ChangepointState: tau out of range");
    if (!(gamma_at(k - 1) < Z[i] && Z[i] <= gamma_at(k))) {
      throw numerical_error("ChangepointState: (tau, Z, gamma) inconsistent");
    }
  }
}

double log_norm_cdf_diff(double a, double b) {
  if (a > -b) return log_norm_cdf_diff(-b, -a);  // reflect into the lower tail
  const double lb = log_norm_cdf(b);
  if (std::isinf(a) && a < 0.0) return lb;
  const double la = log_norm_cdf(a);
  return lb + std::log1p(-std::exp(la - lb));
}

void update_tau(const Eigen::MatrixXd& resid, const MeanModel& mean,
                double sigma2_eps, ChangepointState& st, std::uint64_t seed,
                std::uint32_t iteration) {
  const int N = static_cast<int>(resid.rows());
  const int M = st.M;
  require(resid.cols() == M, "update_tau: residual time dimension mismatch");
  require(sigma2_eps > 0.0, "update_tau: sigma2_eps must be positive");

  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd logw(M);
    mean.segment_loglik(i, resid.row(i), sigma2_eps, logw);
    if (!logw.allFinite()) {
      bad = true;
      continue;
    }
    const double mu = st.muZ_field.values[i];
    for (int k = 1; k <= M; ++k) {
      logw[k - 1] += log_norm_cdf_diff(st.gamma_at(k - 1) - mu, st.gamma_at(k) - mu);
    }
    RngStream rs(seed, rngtag::kTau, iteration, static_cast<std::uint32_t>(i));
    st.tau[i] = 1 + categorical_from_logw(logw, rs.uniform());
  }
  if (bad) throw numerical_error("update_tau: non-finite likelihood");
}

void ind_update_tau(const Eigen::MatrixXd& resid, const MeanModel& mean,
                    double sigma2_eps, int M, Eigen::VectorXi& tau,
                    std::uint64_t seed, std::uint32_t iteration) {
  const int N = static_cast<int>(resid.rows());
  require(resid.cols() == M, "ind_update_tau: residual time dimension mismatch");
  require(sigma2_eps > 0.0, "ind_update_tau: sigma2_eps must be positive");

  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd logw(M);
    mean.segment_loglik(i, resid.row(i), sigma2_eps, logw);
    if (!logw.allFinite()) {
      bad = true;
      continue;
    }
    RngStream rs(seed, rngtag::kTau, iteration, static_cast<std::uint32_t>(i));
    tau[i] = 1 + categorical_from_logw(logw, rs.uniform());
  }
  if (bad) throw numerical_error("ind_update_tau: non-finite likelihood");
}

void update_Z(ChangepointState& st, std::uint64_t seed, std::uint32_t iteration) {
  const int N = static_cast<int>(st.Z.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < N; ++i) {
    const int k = st.tau[i];
    RngStream rs(seed, rngtag::kZ, iteration, static_cast<std::uint32_t>(i));
    st.Z[i] = rs.truncated_normal(st.muZ_field.values[i], st.gamma_at(k - 1),
                                  st.gamma_at(k));
  }
}

void update_gamma(ChangepointState& st, std::uint64_t seed, std::uint32_t iteration) {
  const int M = st.M;
  const int N = static_cast<int>(st.Z.size());
  if (M < 3) return;  // only gamma_1 exists and it is pinned at 0

  // bin extremes of Z per category
  Eigen::VectorXd zmax = Eigen::VectorXd::Constant(M + 1, -kInf);
  Eigen::VectorXd zmin = Eigen::VectorXd::Constant(M + 1, kInf);
  for (int i = 0; i < N; ++i) {
    const int k = st.tau[i];
    zmax[k] = std::max(zmax[k], st.Z[i]);
    zmin[k] = std::min(zmin[k], st.Z[i]);
  }

  for (int k = 2; k <= M - 1; ++k) {
    const double upper_anchor = (k + 1 <= M - 1) ? st.gammas[k] : st.gamma_cap;
    const double lo = std::max(zmax[k], st.gammas[k - 2]);
    const double hi = std::min(zmin[k + 1], upper_anchor);
    if (!(lo < hi)) {
      throw numerical_error("update_gamma: empty interval (invariant violated)");
    }
    RngStream rs(seed, rngtag::kGamma, iteration, static_cast<std::uint32_t>(k));
    st.gammas[k - 1] = lo + (hi - lo) * rs.uniform();
  }
}

SpectralCoeffs sample_block_precision(const ErrorOperator& E, double c,
                                      const Eigen::VectorXd& d,
                                      const SpectralCoeffs& a,
                                      const Eigen::VectorXd& z) {
  SpectralCoeffs out(E.L());
  require(a.L == E.L() && d.size() == a.size() && z.size() == a.size(),
          "sample_block_precision: dimension mismatch");
  for (const auto& b : E.blocks()) {
    const int n = b.size();
    Eigen::MatrixXd B = c * b.inv;
    Eigen::VectorXd ab(n), zb(n);
    for (int r = 0; r < n; ++r) {
      B(r, r) += d[b.coeff_index[r]];
      ab[r] = a.values[b.coeff_index[r]];
      zb[r] = z[b.coeff_index[r]];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) {
      throw singular_operator_error("sample_block_precision: factorization failed");
    }
    Eigen::VectorXd draw = llt.solve(ab) + llt.matrixU().solve(zb);
    for (int r = 0; r < n; ++r) out.values[b.coeff_index[r]] = draw[r];
  }
  return out;
}

void update_muZ(ChangepointState& st, const ErrorOperator& E,
                const Eigen::VectorXd& d_alpha, const ShtPlan& plan,
                std::uint64_t seed, std::uint32_t iteration) {
  const int L = E.L();
  const int ncoef = SpectralCoeffs::size_for(L);

  ScalarField dev(plan.K());
  dev.values = st.Z - Eigen::VectorXd::Constant(st.Z.size(), st.mZ);
  const SpectralCoeffs fwd = plan.forward(dev);
  const SpectralCoeffs rhs = E.solve(fwd);

  Eigen::VectorXd z(ncoef), prior_prec(ncoef);
  for (int idx = 0; idx < ncoef; ++idx) {
    RngStream rs(seed, rngtag::kAlpha, iteration, static_cast<std::uint32_t>(idx));
    z[idx] = rs.normal();
    prior_prec[idx] = 1.0 / d_alpha[idx];
  }
  st.alpha = sample_block_precision(E, 1.0, prior_prec, rhs, z);
  st.muZ_field = plan.inverse(st.alpha);
  st.muZ_field.values.array() += st.mZ;
}

}  // namespace sphcp
