#pragma once

#include <memory>

#include "sphcp/field.hpp"
#include "sphcp/grid.hpp"
#include "sphcp/legendre.hpp"

namespace sphcp {

/// Precomputed plan for transforms between a DH grid and degree-L coefficient
/// space. Immutable after construction and safe for concurrent shared use.
///
/// The forward map is alpha = Psi^T D_w f; the inverse is f = Psi alpha. Both
/// are evaluated separably: longitude trigonometric sums per order m, then
/// weighted Legendre sums per (l, m), with a fixed summation order within each
/// m-channel.
class ShtPlan {
 public:
  ShtPlan(const DHGrid& grid, int L);

  int K() const { return K_; }
  int L() const { return L_; }

  SpectralCoeffs forward(const ScalarField& f) const;
  ScalarField inverse(const SpectralCoeffs& alpha) const;

  const PlmTable& plm() const { return plm_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  int K_;
  int L_;
  Eigen::VectorXd weights_;    // per colatitude row
  PlmTable plm_;               // P̄_lm at cos(theta_i)
  Eigen::MatrixXd cos_table_;  // 2K x (L+1), cos(m phi_j)
  Eigen::MatrixXd sin_table_;  // 2K x (L+1), sin(m phi_j)
};

/// One-shot transforms; construct a ShtPlan for repeated use.
SpectralCoeffs sht_forward(const ScalarField& f, const DHGrid& grid, int L);
ScalarField sht_inverse(const SpectralCoeffs& alpha, const DHGrid& grid);

}  // namespace sphcp
