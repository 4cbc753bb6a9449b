// Independent oracles used by the tests: a long-double route to the
// orthonormalized Legendre functions, brute-force enumeration of the
// changepoint posterior, and small statistics utilities. These deliberately
// avoid the library's implementation paths.
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// P̄_lm via the unnormalized Ferrers recurrence in long double with an
// explicit lgamma normalization (no Condon-Shortley phase).
inline long double assoc_legendre_bar_ld(int l, int m, long double x) {
  // P_mm = (2m-1)!! (1-x^2)^{m/2}, upward in degree at fixed order
  long double pmm = 1.0L;
  const long double omx2 = (1.0L - x) * (1.0L + x);
  for (int k = 1; k <= m; ++k) pmm *= (2.0L * k - 1.0L);
  pmm *= std::pow(omx2, m / 2.0L);
  long double p = pmm;
  if (l > m) {
    long double pm1 = pmm;
    p = x * (2.0L * m + 1.0L) * pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
      const long double pnew =
          ((2.0L * ll - 1.0L) * x * p - (ll + m - 1.0L) * pm1) / (ll - m);
      pm1 = p;
      p = pnew;
    }
  }
  const long double dm = (m == 0) ? 1.0L : 2.0L;
  const long double log_norm =
      0.5L * (std::log(dm * (2.0L * l + 1.0L)) -
              std::log(4.0L * 3.14159265358979323846264338328L) +
              std::lgamma(static_cast<long double>(l - m + 1)) -
              std::lgamma(static_cast<long double>(l + m + 1)));
  return p * std::exp(log_norm);
}

// Brute-force enumeration of the categorical changepoint posterior for one
// location: probabilities proportional to
//   prod_{t<=k} N(y_t; mu1_t, s2) prod_{t>k} N(y_t; mu2_t(k), s2) * pi_k.
// mean_fn(t, k) supplies the mean at time t under changepoint k.
template <typename MeanFn>
Eigen::VectorXd enumerate_tau_posterior(const Eigen::VectorXd& y, MeanFn mean_fn,
                                        double sigma2, const Eigen::VectorXd& pi) {
  const int M = static_cast<int>(pi.size());
  Eigen::VectorXd logw(M);
  for (int k = 1; k <= M; ++k) {
    long double ll = 0.0L;
    for (int t = 1; t <= static_cast<int>(y.size()); ++t) {
      const long double e = y[t - 1] - mean_fn(t, k);
      ll -= e * e / (2.0L * sigma2);
    }
    logw[k - 1] = static_cast<double>(ll) + std::log(pi[k - 1]);
  }
  const double mx = logw.maxCoeff();
  Eigen::VectorXd w = (logw.array() - mx).exp();
  return w / w.sum();
}

// Regularized upper incomplete gamma Q(a, x), for chi-squared tail areas.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // series for P(a,x)
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    const double logp = -x + a * std::log(x) - std::lgamma(a);
    return 1.0 - sum * std::exp(logp);
  }
  // continued fraction for Q(a,x)
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// chi-squared goodness-of-fit p-value for observed counts vs probabilities
inline double chi2_gof_pvalue(const Eigen::VectorXi& counts,
                              const Eigen::VectorXd& probs) {
  const double n = counts.cast<double>().sum();
  double stat = 0.0;
  for (int k = 0; k < counts.size(); ++k) {
    const double e = n * probs[k];
    if (e > 0) stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  return gamma_q(0.5 * (counts.size() - 1), 0.5 * stat);
}

}  // namespace oracle
