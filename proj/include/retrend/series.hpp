#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "retrend/errors.hpp"
#include "retrend/month.hpp"

namespace retrend {

/**
 * One entity's monthly relative search interest.
 *
 * Values are contiguous months starting at `start`, no gaps, all >= 0.
 * Missing months are a hard error upstream; this type never interpolates.
 */
struct MonthlySeries {
    std::string entity_id;
    MonthKey start;
    std::vector<double> values;

    MonthlySeries() = default;

    MonthlySeries(std::string id, MonthKey first, std::vector<double> vals)
        : entity_id(std::move(id)), start(first), values(std::move(vals)) {
        for (double v : values) {
            if (!(v >= 0.0)) {
                throw DomainError("series value must be non-negative, got " + std::to_string(v));
            }
        }
    }

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    MonthKey month_at(std::size_t i) const { return start.plus_months(static_cast<long long>(i)); }

    /// Last covered month; series must be non-empty.
    MonthKey end() const {
        if (values.empty()) throw EmptySeries("end() on empty series");
        return start.plus_months(static_cast<long long>(values.size()) - 1);
    }

    bool covers(const MonthKey& m) const {
        long long off = months_between(start, m);
        return off >= 0 && off < static_cast<long long>(values.size());
    }

    double at(const MonthKey& m) const {
        long long off = months_between(start, m);
        if (off < 0 || off >= static_cast<long long>(values.size())) {
            throw WindowOutOfRange("series " + entity_id + " does not cover " + m.str());
        }
        return values[static_cast<std::size_t>(off)];
    }
};

constexpr std::size_t kWindowHalf = 12;

/**
 * The 24-point unit of causal analysis: twelve months strictly before the
 * release and twelve strictly after it. The release month itself is excluded,
 * so t runs over -12..-1 and +1..+12 with no sample at t = 0.
 */
struct EventWindow {
    std::string borrowed_id;
    std::string borrowee_id;
    MonthKey release;
    std::array<double, kWindowHalf> pre{};   // pre[i] is month release - (12 - i)
    std::array<double, kWindowHalf> post{};  // post[j] is month release + (j + 1)

    /// Month offset from the release for the k-th of the 24 points, k = 0..23.
    static int t_of_index(std::size_t k) {
        return k < kWindowHalf ? static_cast<int>(k) - 12 : static_cast<int>(k - kWindowHalf) + 1;
    }

    double value_at_index(std::size_t k) const {
        return k < kWindowHalf ? pre[k] : post[k - kWindowHalf];
    }

    /// The 24 values in time order, pre half then post half.
    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(2 * kWindowHalf);
        out.insert(out.end(), pre.begin(), pre.end());
        out.insert(out.end(), post.begin(), post.end());
        return out;
    }
};

/// Rescales so the maximum is exactly 100. All-zero input comes back unchanged.
inline MonthlySeries normalize_peak(const MonthlySeries& series) {
    if (series.empty()) {
        throw EmptySeries("normalize_peak on empty series '" + series.entity_id + "'");
    }
    double peak = *std::max_element(series.values.begin(), series.values.end());
    MonthlySeries out = series;
    if (peak > 0.0) {
        double scale = 100.0 / peak;
        // Peak positions are pinned to exactly 100 so the invariant survives
        // the rounding in x * (100 / x).
        for (double& v : out.values) {
            v = (v == peak) ? 100.0 : std::min(v * scale, 100.0);
        }
    }
    return out;
}

/**
 * Cuts the 24-point window around `release` out of `series`.
 * Requires coverage of release - 12 through release + 12 inclusive; the
 * error names the missing months otherwise.
 */
inline EventWindow extract_window(const MonthlySeries& series, const MonthKey& release) {
    long long idx = months_between(series.start, release);
    long long n = static_cast<long long>(series.size());
    long long lo = idx - static_cast<long long>(kWindowHalf);
    long long hi = idx + static_cast<long long>(kWindowHalf);
    if (lo < 0 || hi >= n) {
        std::string missing;
        if (lo < 0) {
            missing += release.plus_months(-static_cast<long long>(kWindowHalf)).str() + ".." +
                       series.start.plus_months(-1).str();
        }
        if (hi >= n) {
            if (!missing.empty()) missing += " and ";
            MonthKey first_missing =
                series.empty() ? release.plus_months(-static_cast<long long>(kWindowHalf))
                               : series.end().successor();
            missing += first_missing.str() + ".." +
                       release.plus_months(static_cast<long long>(kWindowHalf)).str();
        }
        throw WindowOutOfRange("series " + series.entity_id + " missing months " + missing +
                               " around release " + release.str());
    }
    EventWindow w;
    w.borrowed_id = series.entity_id;
    w.release = release;
    for (std::size_t i = 0; i < kWindowHalf; ++i) {
        w.pre[i] = series.values[static_cast<std::size_t>(idx - 12 + static_cast<long long>(i))];
        w.post[i] = series.values[static_cast<std::size_t>(idx + 1 + static_cast<long long>(i))];
    }
    return w;
}

inline bool is_all_zero(const EventWindow& window) {
    auto zero = [](double v) { return v == 0.0; };
    return std::all_of(window.pre.begin(), window.pre.end(), zero) &&
           std::all_of(window.post.begin(), window.post.end(), zero);
}

/// True when the pre half is silent but the post half is not: the pattern of
/// an original with no prior search activity, which makes relative effects
/// meaningless.
inline bool has_zero_baseline(const EventWindow& window) {
    auto zero = [](double v) { return v == 0.0; };
    return std::all_of(window.pre.begin(), window.pre.end(), zero) &&
           !std::all_of(window.post.begin(), window.post.end(), zero);
}

}  // namespace retrend
