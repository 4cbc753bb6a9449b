#include "sphcp/mean_model.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "sphcp/field.hpp"

namespace sphcp {

MeanModel::MeanModel(MeanModelKind kind, const MeanPriors& priors, int n_loc, int M)
    : kind_(kind), priors_(priors), M_(M) {
  if (kind_ == MeanModelKind::constant_linear) {
    beta1_ = Eigen::VectorXd::Constant(n_loc, priors.beta1_mean);
    beta2_ = Eigen::VectorXd::Constant(n_loc, priors.beta2_mean);
  }
  mu1_ = priors.mu1_mean;
  mu2_ = priors.mu2_mean;
}

void MeanModel::set_beta(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2) {
  beta1_ = b1;
  beta2_ = b2;
}

double MeanModel::mean(int loc, int t, int k) const {
  if (t <= k) return mu1_;
  if (kind_ == MeanModelKind::constant_constant) return mu2_;
  return beta1_[loc] + beta2_[loc] * (t - k);
}

void MeanModel::segment_loglik(int loc, const Eigen::RowVectorXd& resid,
                               double sigma2_eps, Eigen::VectorXd& loglik) const {
  const int M = M_;
  loglik.resize(M);
  const double inv2s = 1.0 / (2.0 * sigma2_eps);

  if (kind_ == MeanModelKind::constant_constant) {
    // prefix sums of squared deviations under each segment mean
    double pre = 0.0;
    Eigen::VectorXd post_cum(M + 1);
    post_cum[0] = 0.0;
    for (int t = 1; t <= M; ++t) {
      const double d2 = resid[t - 1] - mu2_;
      post_cum[t] = post_cum[t - 1] + d2 * d2;
    }
    for (int k = 1; k <= M; ++k) {
      const double d1 = resid[k - 1] - mu1_;
      pre += d1 * d1;
      loglik[k - 1] = -(pre + (post_cum[M] - post_cum[k])) * inv2s;
    }
    return;
  }

  // constant-linear: the post-change mean depends on t - k, so each k is
  // accumulated directly
  Eigen::VectorXd pre_cum(M + 1);
  pre_cum[0] = 0.0;
  for (int t = 1; t <= M; ++t) {
    const double d1 = resid[t - 1] - mu1_;
    pre_cum[t] = pre_cum[t - 1] + d1 * d1;
  }
  for (int k = 1; k <= M; ++k) {
    double post = 0.0;
    for (int t = k + 1; t <= M; ++t) {
      const double d = resid[t - 1] - beta1_[loc] - beta2_[loc] * (t - k);
      post += d * d;
    }
    loglik[k - 1] = -(pre_cum[k] + post) * inv2s;
  }
}

void MeanModel::update(const Eigen::MatrixXd& resid, const Eigen::VectorXi& tau,
                       double sigma2_eps, std::uint64_t seed,
                       std::uint32_t iteration) {
  const int N = static_cast<int>(resid.rows());
  const int M = M_;
  const double inv_s2 = 1.0 / sigma2_eps;

  // pooled pre-change scalar (mu1 / beta0)
  {
    double n = 0.0, sum = 0.0;
    for (int i = 0; i < N; ++i) {
      for (int t = 1; t <= tau[i]; ++t) sum += resid(i, t - 1);
      n += tau[i];
    }
    const double prec = n * inv_s2 + 1.0 / priors_.mu1_var;
    const double mean = (sum * inv_s2 + priors_.mu1_mean / priors_.mu1_var) / prec;
    RngStream rs(seed, rngtag::kMeans, iteration, 0);
    mu1_ = mean + rs.normal() / std::sqrt(prec);
  }

  if (kind_ == MeanModelKind::constant_constant) {
    double n = 0.0, sum = 0.0;
    for (int i = 0; i < N; ++i) {
      for (int t = tau[i] + 1; t <= M; ++t) sum += resid(i, t - 1);
      n += M - tau[i];
    }
    const double prec = n * inv_s2 + 1.0 / priors_.mu2_var;
    const double mean = (sum * inv_s2 + priors_.mu2_mean / priors_.mu2_var) / prec;
    RngStream rs(seed, rngtag::kMeans, iteration, 1);
    mu2_ = mean + rs.normal() / std::sqrt(prec);
    return;
  }

  // per-location bivariate (beta1, beta2) over t > tau with ridge prior
  for (int i = 0; i < N; ++i) {
    Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
    P(0, 0) = 1.0 / priors_.beta1_var;
    P(1, 1) = 1.0 / priors_.beta2_var;
    Eigen::Vector2d b(priors_.beta1_mean / priors_.beta1_var,
                      priors_.beta2_mean / priors_.beta2_var);
    for (int t = tau[i] + 1; t <= M; ++t) {
      const Eigen::Vector2d x(1.0, static_cast<double>(t - tau[i]));
      P += inv_s2 * x * x.transpose();
      b += inv_s2 * resid(i, t - 1) * x;
    }
    const Eigen::LLT<Eigen::Matrix2d> llt(P);
    const Eigen::Vector2d mean = llt.solve(b);
    RngStream rs(seed, rngtag::kMeans, iteration, static_cast<std::uint32_t>(2 + i));
    Eigen::Vector2d z(rs.normal(), rs.normal());
    const Eigen::Vector2d draw =
        mean + llt.matrixU().solve(z);  // U^{-1} z has covariance P^{-1}
    beta1_[i] = draw[0];
    beta2_[i] = draw[1];
  }
}

}  // namespace sphcp
