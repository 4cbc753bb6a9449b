#include "sphcp/error_operator.hpp"

#include <cmath>

#include "sphcp/errors.hpp"
#include "sphcp/legendre.hpp"

namespace sphcp {

ErrorOperator::ErrorOperator(const DHGrid& grid, int L) : L_(L) {
  require(L >= 0 && L <= grid.Lmax(), "ErrorOperator: L must satisfy 0 <= L <= K/2-1");
  const int K = grid.K;

  Eigen::VectorXd x(K), w2(K);
  for (int i = 0; i < K; ++i) {
    x[i] = std::cos(grid.colatitudes[i]);
    w2[i] = grid.weights[i] * grid.weights[i];
  }
  PlmTable plm(x, L);

  // blocks ordered by (m, parity); the +-m blocks carry identical entries
  // because the longitude sums differ only through cos vs sin orthogonality
  for (int m = -L; m <= L; ++m) {
    const int am = std::abs(m);
    const double fac = (m == 0) ? 2.0 * K : static_cast<double>(K);
    for (int parity = 0; parity < 2; ++parity) {
      Block b;
      b.m = m;
      b.parity = parity;
      for (int l = am; l <= L; ++l) {
        if (l % 2 != parity) continue;
        b.degrees.push_back(l);
        b.coeff_index.push_back(SpectralCoeffs::index(l, m));
      }
      if (b.degrees.empty()) continue;
      const int n = b.size();
      b.mat.resize(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = r; c < n; ++c) {
          const double* pr = plm.row(b.degrees[r], am);
          const double* pc = plm.row(b.degrees[c], am);
          double s = 0.0;
          for (int i = 0; i < K; ++i) s += pr[i] * pc[i] * w2[i];
          b.mat(r, c) = fac * s;
          b.mat(c, r) = b.mat(r, c);
        }
      }
      b.llt.compute(b.mat);
      if (b.llt.info() != Eigen::Success) {
        throw singular_operator_error("ErrorOperator: block Cholesky failed at m=" +
                                      std::to_string(m));
      }
      b.inv = b.llt.solve(Eigen::MatrixXd::Identity(n, n));
      blocks_.push_back(std::move(b));
    }
  }
}

std::size_t ErrorOperator::nonzero_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) {
    n += static_cast<std::size_t>(b.size()) * static_cast<std::size_t>(b.size());
  }
  return n;
}

SpectralCoeffs ErrorOperator::apply(const SpectralCoeffs& v) const {
  require(v.L == L_, "error_op_apply: dimension mismatch");
  SpectralCoeffs out(L_);
  for (const auto& b : blocks_) {
    const int n = b.size();
    Eigen::VectorXd vb(n);
    for (int r = 0; r < n; ++r) vb[r] = v.values[b.coeff_index[r]];
    Eigen::VectorXd yb = b.mat * vb;
    for (int r = 0; r < n; ++r) out.values[b.coeff_index[r]] = yb[r];
  }
  return out;
}

SpectralCoeffs ErrorOperator::solve(const SpectralCoeffs& v) const {
  require(v.L == L_, "error_op_solve: dimension mismatch");
  SpectralCoeffs out(L_);
  for (const auto& b : blocks_) {
    const int n = b.size();
    Eigen::VectorXd vb(n);
    for (int r = 0; r < n; ++r) vb[r] = v.values[b.coeff_index[r]];
    Eigen::VectorXd yb = b.llt.solve(vb);
    for (int r = 0; r < n; ++r) out.values[b.coeff_index[r]] = yb[r];
  }
  return out;
}

std::vector<int> ErrorOperator::permutation() const {
  std::vector<int> p;
  p.reserve(static_cast<std::size_t>(SpectralCoeffs::size_for(L_)));
  for (const auto& b : blocks_) {
    p.insert(p.end(), b.coeff_index.begin(), b.coeff_index.end());
  }
  return p;
}

}  // namespace sphcp
