#include "sphcp/legendre.hpp"

#include <cmath>
#include <stdexcept>

#include "sphcp/stats.hpp"

namespace sphcp {

namespace {
// Scaled-carry recurrence: values are held as mant * 2^(800*scale) so
// sectoral seeds far below the denormal range still recover correctly at
// higher degrees.
constexpr double kSmall = 0x1p-800;

// log of the sectoral seed P̄_mm(x) (excluding sign; the value is positive).
double log_seed(int m, double omx2) {
  if (m == 0) return -0.5 * std::log(4.0 * kPi);
  double s = std::log(2.0) + std::log(2.0 * m + 1.0) - std::log(4.0 * kPi);
  for (int k = 1; k <= m; ++k) {
    s += std::log((2.0 * k - 1.0) / (2.0 * k));
  }
  return 0.5 * (s + m * std::log(omx2));
}
}  // namespace

void assoc_legendre_bar_row(int L, int m, double x, double* plm) {
  if (m < 0 || m > L || std::abs(x) > 1.0) {
    throw std::invalid_argument("assoc_legendre_bar: need 0 <= m <= l, |x| <= 1");
  }
  const double omx2 = (1.0 - x) * (1.0 + x);
  if (m > 0 && omx2 <= 0.0) {
    for (int l = m; l <= L; ++l) plm[l] = 0.0;
    return;
  }

  const double ls = log_seed(m, omx2);
  int scale = 0;
  double seed;
  if (ls < -550.0) {
    // keep the mantissa in a safe window; actual value = seed * 2^(800*scale)
    const double ls2 = ls / std::log(2.0);
    scale = static_cast<int>(std::floor(ls2 / 800.0));
    seed = std::exp2(ls2 - 800.0 * scale);
  } else {
    seed = std::exp(ls);
  }

  auto emit = [&](double v) {
    if (scale == 0) return v;
    double out = v;
    for (int s = scale; s < 0; ++s) out *= kSmall;
    return out;
  };

  double pmm = seed;
  plm[m] = emit(pmm);
  if (L == m) return;

  double pmmp1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  plm[m + 1] = emit(pmmp1);

  double oldfact = std::sqrt(2.0 * m + 3.0);
  for (int l = m + 2; l <= L; ++l) {
    const double fact =
        std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double pll = (x * pmmp1 - pmm / oldfact) * fact;
    pmm = pmmp1;
    pmmp1 = pll;
    oldfact = fact;
    if (scale < 0 && std::abs(pmmp1) > 0x1p+400) {
      pmm *= kSmall;
      pmmp1 *= kSmall;
      ++scale;
    }
    plm[l] = emit(pmmp1);
  }
}

double assoc_legendre_bar(int l, int m, double x) {
  std::vector<double> row(static_cast<std::size_t>(l) + 1);
  assoc_legendre_bar_row(l, m, x, row.data());
  return row[l];
}

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int k = 1; k < l; ++k) {
    const double pp = ((2.0 * k + 1.0) * x * p - k * pm1) / (k + 1.0);
    pm1 = p;
    p = pp;
  }
  return p;
}

PlmTable::PlmTable(const Eigen::VectorXd& x, int L) : L_(L), n_rows_(x.size()) {
  offset_.resize(L + 1);
  std::ptrdiff_t total = 0;
  for (int m = 0; m <= L; ++m) {
    offset_[m] = total;
    total += static_cast<std::ptrdiff_t>(L - m + 1) * n_rows_;
  }
  data_.resize(total);
  std::vector<double> row(static_cast<std::size_t>(L) + 1);
  for (int i = 0; i < n_rows_; ++i) {
    for (int m = 0; m <= L; ++m) {
      assoc_legendre_bar_row(L, m, x[i], row.data());
      for (int l = m; l <= L; ++l) {
        data_[offset_[m] + static_cast<std::ptrdiff_t>(l - m) * n_rows_ + i] = row[l];
      }
    }
  }
}

}  // namespace sphcp
