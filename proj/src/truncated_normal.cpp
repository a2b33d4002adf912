#include "vocalpersona/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vocalpersona::truncnorm {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

double acklam(double p)
{
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > 1 - p_low) {
        double q = std::sqrt(-2 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
           / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Inverse of the lower tail, p <= 0.5. Refining against erfc keeps relative
// accuracy in the far tail where 1 - p would round to 1.
double lower_tail_quantile(double p)
{
    double x = acklam(p);
    double e = 0.5 * std::erfc(-x * inv_sqrt2) - p;
    if (x * x / 2 > 700) {
        return x;
    }
    double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

// Beyond this many sds both tail masses are handled in log space.
constexpr double far_tail = 5.0;

// Mills ratio sf(x) / phi(x) by its continued fraction, for x >= far_tail.
double mills_ratio(double x)
{
    double r = x;
    for (int k = 120; k >= 1; --k) {
        r = x + k / r;
    }
    return 1.0 / r;
}

double log_sf(double x)
{
    if (x == std::numeric_limits<double>::infinity()) {
        return -std::numeric_limits<double>::infinity();
    }
    if (x < far_tail) {
        return std::log(0.5 * std::erfc(x * inv_sqrt2));
    }
    return -0.5 * x * x - 0.5 * std::log(2 * std::numbers::pi) + std::log(mills_ratio(x));
}

// Standardized interval [a, b] with far_tail <= a < b.
struct UpperTail {
    double a, b, ls_a, ls_b;

    UpperTail(double a_, double b_) : a(a_), b(b_), ls_a(log_sf(a_)), ls_b(log_sf(b_)) {}

    double log_mass() const { return ls_a + std::log(-std::expm1(ls_b - ls_a)); }

    double pdf(double t) const { return std::exp(-0.5 * t * t - 0.5 * std::log(2 * std::numbers::pi) - log_mass()); }

    double cdf(double t) const { return std::expm1(log_sf(t) - ls_a) / std::expm1(ls_b - ls_a); }

    // Newton on the concave, decreasing log_sf(x) - target; after the first
    // step the iterates approach the root from above.
    double quantile(double u) const
    {
        const double target = ls_a + std::log1p(u * std::expm1(ls_b - ls_a));
        double x = a;
        for (int i = 0; i < 100; ++i) {
            const double step = (log_sf(x) - target) * mills_ratio(std::max(x, far_tail));
            x = std::clamp(x + step, a, std::isfinite(b) ? b : std::numeric_limits<double>::max());
            if (std::abs(step) <= 1e-15 * std::abs(x)) {
                break;
            }
        }
        return x;
    }
};

}  // namespace

double std_cdf(double x)
{
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

double std_sf(double x)
{
    return 0.5 * std::erfc(x * inv_sqrt2);
}

double std_quantile(double p)
{
    if (p <= 0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p >= 1) {
        return std::numeric_limits<double>::infinity();
    }
    if (p <= 0.5) {
        return lower_tail_quantile(p);
    }
    return -lower_tail_quantile(1 - p);
}

double pdf(double z, double mean, double sd, double lo, double hi)
{
    if (z < lo || z > hi) {
        return 0.0;
    }
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    double t = (z - mean) / sd;
    if (a >= far_tail) {
        return UpperTail(a, b).pdf(t) / sd;
    }
    if (b <= -far_tail) {
        return UpperTail(-b, -a).pdf(-t) / sd;
    }
    double mass = (a > 0) ? std_sf(a) - std_sf(b) : std_cdf(b) - std_cdf(a);
    if (!(mass > 0)) {
        return 0.0;
    }
    return std::exp(-0.5 * t * t) / (sd * std::sqrt(2 * std::numbers::pi) * mass);
}

double cdf(double z, double mean, double sd, double lo, double hi)
{
    if (z <= lo) {
        return 0.0;
    }
    if (z >= hi) {
        return 1.0;
    }
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    double t = (z - mean) / sd;
    if (a >= far_tail) {
        return UpperTail(a, b).cdf(t);
    }
    if (b <= -far_tail) {
        return 1.0 - UpperTail(-b, -a).cdf(-t);
    }
    if (a > 0) {
        double mass = std_sf(a) - std_sf(b);
        return mass > 0 ? (std_sf(a) - std_sf(t)) / mass : 0.5;
    }
    double mass = std_cdf(b) - std_cdf(a);
    return mass > 0 ? (std_cdf(t) - std_cdf(a)) / mass : 0.5;
}

double quantile(double u, double mean, double sd, double lo, double hi)
{
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    double x;
    if (a >= far_tail) {
        x = UpperTail(a, b).quantile(u);
    }
    else if (b <= -far_tail) {
        x = -UpperTail(-b, -a).quantile(1 - u);
    }
    else if (a >= 0) {
        // Entire interval in the upper half: work with survival functions.
        double sa = std_sf(a);
        double sb = std_sf(b);
        double s = sa - u * (sa - sb);
        x = s > 0 ? -std_quantile(s) : a;
    }
    else if (b <= 0) {
        double pa = std_cdf(a);
        double pb = std_cdf(b);
        double p = pa + u * (pb - pa);
        x = p > 0 ? std_quantile(p) : b;
    }
    else {
        // a < 0 < b: split at zero so each half uses its accurate tail.
        double pa = std_cdf(a);
        double sb = std_sf(b);
        double lower_mass = 0.5 - pa;
        double upper_mass = 0.5 - sb;
        double target = u * (lower_mass + upper_mass);
        if (target <= lower_mass) {
            x = std_quantile(pa + target);
        }
        else {
            double s = sb + (lower_mass + upper_mass - target);
            x = -std_quantile(s);
        }
    }
    return std::clamp(mean + sd * x, lo, hi);
}

}  // namespace vocalpersona::truncnorm
