#pragma once

#include <cmath>
#include <string>

#include "retrend/errors.hpp"

namespace retrend {

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double ibeta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw DomainError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/**
 * Regularized incomplete beta I_x(a, b).
 *
 * Continued-fraction evaluation with the symmetry switch at
 * x = (a + 1) / (a + b + 2) so the fraction always converges fast.
 */
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("incomplete beta requires a, b > 0");
    }
    if (std::isnan(x)) throw DomainError("incomplete beta at NaN");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double ln_front =
        a * std::log(x) + b * std::log1p(-x) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::ibeta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * detail::ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
inline double t_sf_two_sided(double t_stat, long df) {
    if (df < 1) throw DomainError("t distribution needs df >= 1, got " + std::to_string(df));
    if (std::isnan(t_stat)) throw DomainError("t statistic is NaN");
    if (std::isinf(t_stat)) return 0.0;
    const double nu = static_cast<double>(df);
    const double x = nu / (nu + t_stat * t_stat);
    return regularized_incomplete_beta(nu / 2.0, 0.5, x);
}

/// Survival function of Fisher's F with (df1, df2) degrees of freedom.
inline double f_sf(double f_stat, long df1, long df2) {
    if (df1 < 1 || df2 < 1) {
        throw DomainError("F distribution needs df1, df2 >= 1, got (" + std::to_string(df1) +
                          ", " + std::to_string(df2) + ")");
    }
    if (std::isnan(f_stat) || f_stat < 0.0) {
        throw DomainError("F statistic must be non-negative");
    }
    if (std::isinf(f_stat)) return 0.0;
    const double d1 = static_cast<double>(df1);
    const double d2 = static_cast<double>(df2);
    const double x = d2 / (d2 + d1 * f_stat);
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x);
}

}  // namespace retrend
