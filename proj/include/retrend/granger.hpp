#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "retrend/distributions.hpp"
#include "retrend/errors.hpp"
#include "retrend/month.hpp"
#include "retrend/ols.hpp"
#include "retrend/series.hpp"

namespace retrend {

struct GrangerLag {
    int lag = 0;
    double f_stat = 0.0;
    double p_value = 1.0;
    long df1 = 0;
    long df2 = 0;
    bool perfect_fit = false;
};

/**
 * Outcome of the nested-AR causality test. `causal` is true when any tested
 * lag rejects at alpha; all per-lag statistics are kept so stricter rules
 * (e.g. Bonferroni) can be applied downstream.
 */
struct GrangerResult {
    std::vector<GrangerLag> per_lag;  // lags 1..max_lag_used, contiguous
    int max_lag_requested = 0;
    int max_lag_used = 0;
    bool causal = false;
    bool perfect_fit_flag = false;
};

/// Largest lag with positive residual degrees of freedom: T - 3L - 1 >= 1.
inline int granger_feasible_max_lag(std::size_t length) {
    return static_cast<int>((static_cast<long long>(length) - 2) / 3);
}

/**
 * Tests whether `predictor` Granger-causes `target`.
 *
 * For each lag L the restricted model regresses target_t on a constant and
 * its own L lags; the unrestricted model adds L predictor lags. The SSR
 * F-statistic ((SSR_r - SSR_u)/L) / (SSR_u/(T - 3L - 1)) is compared to the
 * F distribution. Lags the series cannot support are capped, not errors.
 */
inline GrangerResult granger_test(const std::vector<double>& target,
                                  const std::vector<double>& predictor, int max_lag = 10,
                                  double alpha = 0.05) {
    if (target.size() != predictor.size()) {
        throw DomainError("target and predictor must be aligned to equal length, got " +
                          std::to_string(target.size()) + " vs " +
                          std::to_string(predictor.size()));
    }
    if (max_lag < 1) throw DomainError("max_lag must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    const std::size_t length = target.size();
    if (length < 5) {
        throw SeriesTooShort("granger test needs at least 5 observations, got " +
                             std::to_string(length));
    }
    const auto [min_it, max_it] = std::minmax_element(target.begin(), target.end());
    if (*min_it == *max_it) {
        throw DegenerateTarget("target series is constant");
    }

    GrangerResult result;
    result.max_lag_requested = max_lag;
    result.max_lag_used = std::min(max_lag, granger_feasible_max_lag(length));

    double target_ssq = 0.0;
    for (double v : target) target_ssq += v * v;

    for (int lag = 1; lag <= result.max_lag_used; ++lag) {
        const std::size_t rows = length - static_cast<std::size_t>(lag);
        const std::size_t p_restricted = static_cast<std::size_t>(lag) + 1;
        const std::size_t p_unrestricted = 2 * static_cast<std::size_t>(lag) + 1;

        Matrix restricted(rows, p_restricted);
        Matrix unrestricted(rows, p_unrestricted);
        std::vector<double> y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = r + static_cast<std::size_t>(lag);
            y[r] = target[t];
            restricted(r, 0) = 1.0;
            unrestricted(r, 0) = 1.0;
            for (int k = 1; k <= lag; ++k) {
                restricted(r, static_cast<std::size_t>(k)) = target[t - static_cast<std::size_t>(k)];
                unrestricted(r, static_cast<std::size_t>(k)) = target[t - static_cast<std::size_t>(k)];
                unrestricted(r, static_cast<std::size_t>(lag + k)) =
                    predictor[t - static_cast<std::size_t>(k)];
            }
        }

        const double rss_r = least_squares_rss(restricted, y);
        // Models are nested, so the unrestricted RSS can exceed the
        // restricted one only through roundoff; clamp that away.
        const double rss_u = std::min(least_squares_rss(unrestricted, y), rss_r);

        GrangerLag entry;
        entry.lag = lag;
        entry.df1 = lag;
        entry.df2 = static_cast<long>(rows) - static_cast<long>(p_unrestricted);
        if (rss_u < 1e-12 * rss_r) {
            entry.perfect_fit = true;
            entry.f_stat = std::numeric_limits<double>::infinity();
            entry.p_value = 0.0;
            result.perfect_fit_flag = true;
        } else if (rss_r <= 1e-20 * target_ssq) {
            // Own lags already fit perfectly; the predictor cannot improve.
            entry.f_stat = 0.0;
            entry.p_value = 1.0;
        } else {
            entry.f_stat = ((rss_r - rss_u) / static_cast<double>(entry.df1)) /
                           (rss_u / static_cast<double>(entry.df2));
            entry.p_value = f_sf(entry.f_stat, entry.df1, entry.df2);
        }
        if (entry.p_value < alpha) result.causal = true;
        result.per_lag.push_back(entry);
    }
    return result;
}

/// Two series trimmed to their common month range, ready for lagging.
struct AlignedPair {
    MonthKey start;
    std::vector<double> target;
    std::vector<double> predictor;
    std::size_t dropped_target = 0;     // months outside the overlap
    std::size_t dropped_predictor = 0;
};

inline AlignedPair align_common_range(const MonthlySeries& target,
                                      const MonthlySeries& predictor) {
    if (target.empty() || predictor.empty()) {
        throw EmptySeries("cannot align an empty series");
    }
    const MonthKey start = std::max(target.start, predictor.start);
    const MonthKey stop = std::min(target.end(), predictor.end());
    AlignedPair out;
    out.start = start;
    if (stop < start) {
        out.dropped_target = target.size();
        out.dropped_predictor = predictor.size();
        return out;
    }
    const std::size_t n = static_cast<std::size_t>(months_between(start, stop)) + 1;
    out.target.reserve(n);
    out.predictor.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MonthKey m = start.plus_months(static_cast<long long>(i));
        out.target.push_back(target.at(m));
        out.predictor.push_back(predictor.at(m));
    }
    out.dropped_target = target.size() - n;
    out.dropped_predictor = predictor.size() - n;
    return out;
}

}  // namespace retrend
