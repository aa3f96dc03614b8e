#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "retrend/distributions.hpp"
#include "retrend/errors.hpp"
#include "retrend/ols.hpp"
#include "retrend/series.hpp"

namespace retrend {

/// |intercept| below this and the relative effect is undefined (outlier).
constexpr double kBaselineEpsilon = 1e-6;

/**
 * Fit of the discontinuity model
 *     y(t) = b0 + b1 t + b2 [t > 0] + b3 t [t > 0]
 * over t in {-12..-1, +1..+12}. b2 is the intercept jump at the release,
 * the average treatment effect; ate_relative_pct expresses it against the
 * pre-release intercept, where 100 means the intercept doubled.
 */
struct RddFit {
    double beta0_intercept = 0.0;
    double beta1_trend = 0.0;
    double beta2_jump = 0.0;
    double beta3_trend_change = 0.0;
    std::array<double, 4> standard_errors{};
    double residual_sum_squares = 0.0;
    double t_stat_jump = 0.0;
    double p_value_jump = 1.0;
    double model_f_stat = 0.0;   // whole-model F against the constant fit;
    double model_p_value = 1.0;  // reported, but never drives `significant`
    double ate_relative_pct = std::numeric_limits<double>::quiet_NaN();
    bool significant = false;
    bool outlier = false;
};

/**
 * Fits the jump model to a 24-point window and screens the jump term with a
 * two-sided t-test at `alpha` (df = 20).
 *
 * A window with no pre-release activity, or a pre-release intercept below
 * the baseline epsilon, is flagged as an outlier and its relative effect is
 * left undefined.
 */
inline RddFit fit_rdd(const EventWindow& window, double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
    if (is_all_zero(window)) {
        throw DegenerateWindow("window is zero at every point");
    }

    const std::vector<double> y = window.flatten();
    const std::size_t n = y.size();
    Matrix design(n, 4);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(EventWindow::t_of_index(k));
        const double post = t > 0.0 ? 1.0 : 0.0;
        design(k, 0) = 1.0;
        design(k, 1) = t;
        design(k, 2) = post;
        design(k, 3) = t * post;
    }
    const OlsFit ols = ols_fit(design, y);

    RddFit fit;
    fit.beta0_intercept = ols.coefficients[0];
    fit.beta1_trend = ols.coefficients[1];
    fit.beta2_jump = ols.coefficients[2];
    fit.beta3_trend_change = ols.coefficients[3];
    for (std::size_t j = 0; j < 4; ++j) fit.standard_errors[j] = ols.standard_errors[j];
    fit.residual_sum_squares = ols.residual_sum_squares;

    double ssq = 0.0;
    double mean = 0.0;
    double max_abs = 0.0;
    for (double v : y) {
        ssq += v * v;
        mean += v;
        max_abs = std::max(max_abs, std::abs(v));
    }
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (double v : y) tss += (v - mean) * (v - mean);

    const double df = static_cast<double>(ols.degrees_of_freedom);
    const bool perfect = ols.residual_sum_squares <= 1e-20 * ssq;
    if (perfect) {
        // Zero residual leaves no noise scale; the jump is either exactly
        // there or exactly absent. Thresholds are relative so the branch
        // stays scale invariant.
        const bool jump_present = std::abs(fit.beta2_jump) > 1e-9 * max_abs;
        fit.t_stat_jump = jump_present ? std::numeric_limits<double>::infinity() : 0.0;
        fit.p_value_jump = jump_present ? 0.0 : 1.0;
        const bool model_explains = tss > 1e-20 * ssq;
        fit.model_f_stat = model_explains ? std::numeric_limits<double>::infinity() : 0.0;
        fit.model_p_value = model_explains ? 0.0 : 1.0;
    } else {
        fit.t_stat_jump = fit.beta2_jump / ols.standard_errors[2];
        fit.p_value_jump = t_sf_two_sided(fit.t_stat_jump, ols.degrees_of_freedom);
        const double explained = std::max(tss - ols.residual_sum_squares, 0.0);
        fit.model_f_stat = (explained / 3.0) / (ols.residual_sum_squares / df);
        fit.model_p_value = f_sf(fit.model_f_stat, 3, ols.degrees_of_freedom);
    }

    const bool tiny_baseline = std::abs(fit.beta0_intercept) <= kBaselineEpsilon;
    fit.outlier = has_zero_baseline(window) || tiny_baseline;
    if (!tiny_baseline) {
        fit.ate_relative_pct = 100.0 * fit.beta2_jump / fit.beta0_intercept;
    }
    fit.significant = fit.p_value_jump < alpha;
    return fit;
}

}  // namespace retrend
