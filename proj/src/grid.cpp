#include "sphcp/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "sphcp/stats.hpp"

namespace sphcp {

// Per-point weight at colatitude theta. The Driscoll-Healy row sum
// (4/K) sin(theta) sum_{j<K/2} sin((2j+1)theta)/(2j+1) integrates polynomials
// of degree < K against sin(theta) d(theta); the extra pi/K spreads the row
// weight over the 2K longitudes so the full-sphere point weights total 4*pi.
static double dh_weight(int K, double theta) {
  double s = 0.0;
  for (int j = 0; j < K / 2; ++j) {
    s += std::sin((2 * j + 1) * theta) / (2 * j + 1);
  }
  return (4.0 * kPi / (K * static_cast<double>(K))) * std::sin(theta) * s;
}

DHGrid build_grid(int K) {
  if (K < 4 || K % 2 != 0) {
    throw std::invalid_argument("build_grid: K must be even and >= 4");
  }
  DHGrid g;
  g.K = K;
  g.colatitudes.resize(K);
  g.weights.resize(K);
  g.longitudes.resize(2 * K);
  for (int i = 0; i < K; ++i) {
    const double theta = kPi * i / K;
    g.colatitudes[i] = theta;
    g.weights[i] = (i == 0) ? 0.0 : dh_weight(K, theta);
  }
  for (int j = 0; j < 2 * K; ++j) {
    g.longitudes[j] = kPi * j / K;
  }
  return g;
}

}  // namespace sphcp
