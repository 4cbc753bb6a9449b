#pragma once

#include <cmath>

namespace sphcp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// log of the standard normal CDF, accurate into the far lower tail.
double log_norm_cdf(double x);

/// Standard normal quantile (inverse CDF), full double precision.
double norm_quantile(double p);

/// Mean of a truncated standard normal on [a, b] (either bound may be infinite).
double truncnorm_mean(double a, double b);

}  // namespace sphcp
