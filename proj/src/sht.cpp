#include "sphcp/sht.hpp"

#include <cmath>

namespace sphcp {

namespace {
Eigen::VectorXd cos_theta(const DHGrid& grid) {
  Eigen::VectorXd x(grid.K);
  for (int i = 0; i < grid.K; ++i) x[i] = std::cos(grid.colatitudes[i]);
  return x;
}
}  // namespace

ShtPlan::ShtPlan(const DHGrid& grid, int L)
    : K_(grid.K), L_(L), weights_(grid.weights), plm_(cos_theta(grid), L) {
  require(L >= 0 && L <= grid.Lmax(), "ShtPlan: L must satisfy 0 <= L <= K/2-1");
  const int nphi = 2 * K_;
  cos_table_.resize(nphi, L + 1);
  sin_table_.resize(nphi, L + 1);
  for (int j = 0; j < nphi; ++j) {
    for (int m = 0; m <= L; ++m) {
      cos_table_(j, m) = std::cos(m * grid.longitudes[j]);
      sin_table_(j, m) = std::sin(m * grid.longitudes[j]);
    }
  }
}

SpectralCoeffs ShtPlan::forward(const ScalarField& f) const {
  require(f.K == K_, "sht_forward: field grid size mismatch");
  const int nphi = 2 * K_;

  // longitude sums per row: c(i,m) = sum_j f(i,j) cos(m phi_j), s likewise
  Eigen::MatrixXd c(K_, L_ + 1), s(K_, L_ + 1);
  for (int i = 0; i < K_; ++i) {
    if (weights_[i] == 0.0) {
      c.row(i).setZero();
      s.row(i).setZero();
      continue;
    }
    for (int m = 0; m <= L_; ++m) {
      double cs = 0.0, sn = 0.0;
      const double* frow = f.values.data() + static_cast<Eigen::Index>(i) * nphi;
      for (int j = 0; j < nphi; ++j) {
        cs += frow[j] * cos_table_(j, m);
        sn += frow[j] * sin_table_(j, m);
      }
      c(i, m) = weights_[i] * cs;
      s(i, m) = weights_[i] * sn;
    }
  }

  SpectralCoeffs alpha(L_);
  for (int m = 0; m <= L_; ++m) {
    for (int l = m; l <= L_; ++l) {
      const double* p = plm_.row(l, m);
      double ac = 0.0, as = 0.0;
      for (int i = 0; i < K_; ++i) {
        ac += p[i] * c(i, m);
        as += p[i] * s(i, m);
      }
      alpha(l, m) = ac;
      if (m > 0) alpha(l, -m) = as;
    }
  }
  return alpha;
}

ScalarField ShtPlan::inverse(const SpectralCoeffs& alpha) const {
  require(alpha.L == L_, "sht_inverse: coefficient degree mismatch with plan");
  const int nphi = 2 * K_;

  // Legendre sums per row: g(i,m) = sum_l alpha(l,m) P̄_lm(x_i), h for m<0
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K_, L_ + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(K_, L_ + 1);
  for (int m = 0; m <= L_; ++m) {
    for (int l = m; l <= L_; ++l) {
      const double* p = plm_.row(l, m);
      const double ac = alpha(l, m);
      const double as = (m > 0) ? alpha(l, -m) : 0.0;
      for (int i = 0; i < K_; ++i) {
        g(i, m) += ac * p[i];
        if (m > 0) h(i, m) += as * p[i];
      }
    }
  }

  ScalarField f(K_);
  for (int i = 0; i < K_; ++i) {
    double* frow = f.values.data() + static_cast<Eigen::Index>(i) * nphi;
    for (int j = 0; j < nphi; ++j) {
      double v = g(i, 0);
      for (int m = 1; m <= L_; ++m) {
        v += g(i, m) * cos_table_(j, m) + h(i, m) * sin_table_(j, m);
      }
      frow[j] = v;
    }
  }
  return f;
}

SpectralCoeffs sht_forward(const ScalarField& f, const DHGrid& grid, int L) {
  require(L <= grid.Lmax(), "sht_forward: L exceeds grid capacity");
  return ShtPlan(grid, L).forward(f);
}

ScalarField sht_inverse(const SpectralCoeffs& alpha, const DHGrid& grid) {
  require(alpha.L <= grid.Lmax(), "sht_inverse: degree exceeds grid capacity");
  return ShtPlan(grid, alpha.L).inverse(alpha);
}

}  // namespace sphcp
