#pragma once

namespace vocalpersona::truncnorm {

/// Standard normal CDF, Phi(x).
double std_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double std_sf(double x);

/// Inverse of Phi on (0,1). Acklam's rational approximation followed by one
/// Halley step against erfc; relative error is near machine precision.
double std_quantile(double p);

/// Density of N(mean, sd) restricted to [lo, hi] and renormalized.
/// Zero outside [lo, hi].
double pdf(double z, double mean, double sd, double lo, double hi);

/// CDF of the truncated normal; 0 below lo, 1 above hi.
double cdf(double z, double mean, double sd, double lo, double hi);

/// Inverse CDF of the truncated normal evaluated at u in (0,1).
///
/// The interval probability is split at the median so that mass on either
/// side is computed from the lower (Phi) or upper (1 - Phi) tail, whichever
/// avoids cancellation. The result is clamped to [lo, hi].
double quantile(double u, double mean, double sd, double lo, double hi);

}  // namespace vocalpersona::truncnorm
