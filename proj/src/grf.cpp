#include "sphcp/grf.hpp"

#include <cmath>

namespace sphcp {

SpectralCoeffs sample_grf_coeffs(const MaternSpec& spec, int L, std::uint64_t seed,
                                 std::uint32_t tag, std::uint32_t iteration) {
  SpectralCoeffs alpha(L);
  for (int l = 0; l <= L; ++l) {
    const double sd = std::sqrt(spectral_density(spec, l));
    for (int m = -l; m <= l; ++m) {
      const int idx = SpectralCoeffs::index(l, m);
      RngStream rs(seed, tag, iteration, static_cast<std::uint32_t>(idx));
      alpha.values[idx] = sd * rs.normal();
    }
  }
  return alpha;
}

GrfDraw sample_grf(const MaternSpec& spec, int L, const ShtPlan& plan,
                   std::uint64_t seed, std::uint32_t tag, std::uint32_t iteration) {
  GrfDraw out;
  out.coeffs = sample_grf_coeffs(spec, L, seed, tag, iteration);
  out.field = plan.inverse(out.coeffs);
  return out;
}

}  // namespace sphcp
