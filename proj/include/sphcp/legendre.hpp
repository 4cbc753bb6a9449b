#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace sphcp {

/// Orthonormalized associated Legendre function P̄_lm(x) with
/// integral_{-1}^{1} P̄_lm P̄_l'm dx = (2 - delta_{0m})/(2*pi) delta_{ll'},
/// no Condon-Shortley phase. Stable normalized recurrence; the sectoral seed
/// is accumulated in log space so degrees beyond ~150 do not overflow.
double assoc_legendre_bar(int l, int m, double x);

/// Fills plm[l] = P̄_lm(x) for l = m..L (plm must have L+1 entries; entries
/// below index m are left untouched).
void assoc_legendre_bar_row(int L, int m, double x, double* plm);

/// Standard Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

/// Cached table of P̄_lm(x_i) for a set of abscissae, laid out per m with the
/// row index innermost.
class PlmTable {
 public:
  PlmTable(const Eigen::VectorXd& x, int L);

  int L() const { return L_; }
  int n_rows() const { return static_cast<int>(n_rows_); }

  /// Value at abscissa i for (l, m), 0 <= m <= l <= L.
  double operator()(int i, int l, int m) const {
    return data_[offset_[m] + static_cast<std::ptrdiff_t>(l - m) * n_rows_ + i];
  }

  /// Pointer to the n_rows() values for fixed (l, m).
  const double* row(int l, int m) const {
    return data_.data() + offset_[m] + static_cast<std::ptrdiff_t>(l - m) * n_rows_;
  }

 private:
  int L_;
  std::ptrdiff_t n_rows_;
  std::vector<double> data_;
  std::vector<std::ptrdiff_t> offset_;  // per m
};

}  // namespace sphcp
