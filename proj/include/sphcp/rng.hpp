#pragma once

#include <cstdint>

namespace sphcp {

// Stream tags keep every sampled quantity on its own counter-based stream so
// that draws are a pure function of (seed, tag, iteration, index) and never
// depend on thread scheduling or on the truncation degree of the model.
namespace rngtag {
inline constexpr std::uint32_t kInit = 0;
inline constexpr std::uint32_t kTau = 1;
inline constexpr std::uint32_t kZ = 2;
inline constexpr std::uint32_t kGamma = 3;
inline constexpr std::uint32_t kAlpha = 4;
inline constexpr std::uint32_t kU = 5;
inline constexpr std::uint32_t kMeans = 6;
inline constexpr std::uint32_t kSigmaEps = 7;
inline constexpr std::uint32_t kSigmaU = 8;
inline constexpr std::uint32_t kXi = 9;
inline constexpr std::uint32_t kSim = 10;
inline constexpr std::uint32_t kTest = 11;
inline constexpr std::uint32_t kSimTau = 12;
inline constexpr std::uint32_t kSimNoise = 13;
}  // namespace rngtag

/// Philox4x32-10 block: 128-bit counter, 64-bit key, 128-bit output.
void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2],
                std::uint32_t out[4]);

/// Counter-based random stream keyed by (seed, tag, iteration, index).
///
/// Streams with distinct keys are independent; a stream may be consumed for
/// any number of variates. All variates are derived by inverse CDF where a
/// closed form exists so that chains driven by the same key couple across
/// model variants (shared uniforms).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t tag, std::uint32_t iteration,
            std::uint32_t index);

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();

  /// Standard normal via inverse CDF.
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  /// Truncated standard normal on [a,b] shifted by mu: draws X ~ N(mu,1)
  /// conditioned to [a,b]. Inverse CDF in the central regime, exponential
  /// rejection when the interval lies beyond 4 sd of mu.
  double truncated_normal(double mu, double a, double b);

 private:
  std::uint32_t next_u32();

  std::uint32_t key_[2];
  std::uint32_t ctr_[4];
  std::uint32_t buf_[4];
  int have_ = 0;
};

}  // namespace sphcp
