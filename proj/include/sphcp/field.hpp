#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace sphcp {

/// Real spherical-harmonic coefficient vector. Entry for (l, m) lives at
/// position l*l + l + m, so the (L+1)^2 entries hold contiguous per-l slices.
struct SpectralCoeffs {
  int L = -1;
  Eigen::VectorXd values;

  SpectralCoeffs() = default;
  explicit SpectralCoeffs(int degree)
      : L(degree), values(Eigen::VectorXd::Zero((degree + 1) * (degree + 1))) {}

  static int index(int l, int m) { return l * l + l + m; }
  static int size_for(int L) { return (L + 1) * (L + 1); }

  double& operator()(int l, int m) { return values[index(l, m)]; }
  double operator()(int l, int m) const { return values[index(l, m)]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// Scalar field sampled on a DH grid, row-major with the colatitude index
/// outermost: entry for (theta_i, phi_j) at i*2K + j.
struct ScalarField {
  int K = 0;
  Eigen::VectorXd values;

  ScalarField() = default;
  explicit ScalarField(int K_) : K(K_), values(Eigen::VectorXd::Zero(2 * K_ * K_)) {}

  double& operator()(int i, int j) { return values[static_cast<Eigen::Index>(i) * 2 * K + j]; }
  double operator()(int i, int j) const {
    return values[static_cast<Eigen::Index>(i) * 2 * K + j];
  }
  int size() const { return static_cast<int>(values.size()); }
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace sphcp
