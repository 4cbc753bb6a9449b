#include "sphcp/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "sphcp/errors.hpp"

namespace sphcp {

namespace {

// G7/K15 nodes and weights on [-1, 1]
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {0.129484966168870, 0.279705391489277,
                                     0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment eval_segment(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double fx = (i == 7) ? f(c)
                               : f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
    kron += kWeights[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = kron * h;
  s.error = std::abs((kron - gauss) * h);
  return s;
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_intervals) {
  if (a == b) return 0.0;
  std::priority_queue<Segment> heap;
  Segment s0 = eval_segment(f, a, b);
  double total = s0.value, err = s0.error;
  heap.push(s0);
  int n = 1;
  while (err > abs_tol && n < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = eval_segment(f, worst.a, mid);
    Segment right = eval_segment(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  if (err > abs_tol) {
    throw numerical_error("integrate_gk: tolerance not reached (err=" +
                          std::to_string(err) + ")");
  }
  return total;
}

}  // namespace sphcp
