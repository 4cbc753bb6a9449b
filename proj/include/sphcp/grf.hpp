#pragma once

#include "sphcp/field.hpp"
#include "sphcp/matern.hpp"
#include "sphcp/rng.hpp"
#include "sphcp/sht.hpp"

namespace sphcp {

/// Draws a mean-zero Gaussian random field truncated at degree L: coefficients
/// alpha_lm ~ N(0, S_l) independently, field = Psi alpha. The draw for each
/// coefficient comes from a stream keyed by (seed, tag, iteration, l*l+l+m),
/// so fields at different truncation degrees share their common channels.
struct GrfDraw {
  SpectralCoeffs coeffs;
  ScalarField field;
};

GrfDraw sample_grf(const MaternSpec& spec, int L, const ShtPlan& plan,
                   std::uint64_t seed, std::uint32_t tag, std::uint32_t iteration);

/// Coefficients only (no inverse transform).
SpectralCoeffs sample_grf_coeffs(const MaternSpec& spec, int L, std::uint64_t seed,
                                 std::uint32_t tag, std::uint32_t iteration);

}  // namespace sphcp
