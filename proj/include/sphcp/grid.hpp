#pragma once

#include <Eigen/Core>

namespace sphcp {

/// Equiangular Driscoll-Healy grid: K colatitude rows at theta_i = pi*i/K and
/// 2K longitudes at phi_j = pi*j/K, with per-point quadrature weights w(theta_i)
/// normalized so that sum_{i,j} w_i = 4*pi and Psi^T D_w Psi = I for all
/// harmonics up to degree Lmax = K/2 - 1.
struct DHGrid {
  int K = 0;
  Eigen::VectorXd colatitudes;  // K entries, theta_i = pi*i/K
  Eigen::VectorXd longitudes;   // 2K entries, phi_j = pi*j/K
  Eigen::VectorXd weights;      // K entries (steradians per point); w_0 = 0

  int Lmax() const { return K / 2 - 1; }
  int n_points() const { return 2 * K * K; }
};

/// Builds the grid. Throws std::invalid_argument unless K is even and >= 4.
DHGrid build_grid(int K);

}  // namespace sphcp
