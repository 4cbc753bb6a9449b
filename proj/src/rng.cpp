#include "sphcp/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sphcp/stats.hpp"

namespace sphcp {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t t1 = c[1], t3 = c[3];
  c[0] = hi1 ^ t1 ^ k0;
  c[1] = lo1;
  c[2] = hi0 ^ t3 ^ k1;
  c[3] = lo0;
}
}  // namespace

void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2],
                std::uint32_t out[4]) {
  std::uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t tag,
                     std::uint32_t iteration, std::uint32_t index) {
  key_[0] = static_cast<std::uint32_t>(seed);
  key_[1] = static_cast<std::uint32_t>(seed >> 32);
  ctr_[0] = 0;  // block counter within the stream
  ctr_[1] = iteration;
  ctr_[2] = index;
  ctr_[3] = tag;
}

std::uint32_t RngStream::next_u32() {
  if (have_ == 0) {
    philox4x32(ctr_, key_, buf_);
    ++ctr_[0];
    have_ = 4;
  }
  return buf_[4 - have_--];
}

double RngStream::uniform() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return norm_quantile(uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // boost: X ~ Gamma(a+1), X * U^{1/a} ~ Gamma(a)
    const double x = gamma(shape + 1.0);
    return x * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::truncated_normal(double mu, double a, double b) {
  double lo = a - mu, hi = b - mu;
  const double kTail = 4.0;
  if (lo >= kTail || hi <= -kTail) {
    // one-sided exponential rejection (Robert 1995), mirrored for the left tail
    const bool flip = hi <= -kTail;
    double l = flip ? -hi : lo;
    double u = flip ? -lo : hi;
    const double alpha = 0.5 * (l + std::sqrt(l * l + 4.0));
    for (;;) {
      const double e = -std::log(uniform()) / alpha;
      const double x = l + e;
      if (x > u) continue;
      const double rho = std::exp(-0.5 * (x - alpha) * (x - alpha));
      if (uniform() <= rho) return mu + (flip ? -x : x);
    }
  }
  // central regime: inverse CDF, using the complementary tail when both
  // endpoints are positive to preserve precision
  if (lo > 0.0) {
    const double pb = norm_cdf(-hi), pa = norm_cdf(-lo);
    const double p = pb + (pa - pb) * uniform();
    return mu - norm_quantile(p);
  }
  const double pa = norm_cdf(lo), pb = norm_cdf(hi);
  const double p = pa + (pb - pa) * uniform();
  return mu + norm_quantile(p);
}

}  // namespace sphcp
