#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "retrend/errors.hpp"

namespace retrend {

/**
 * Calendar month with exact arithmetic.
 *
 * Internally a month counts as year * 12 + (month - 1), so differences and
 * successors are plain integer operations with year carry handled for free.
 */
struct MonthKey {
    int year = 2004;
    int month = 1;  // 1..12

    MonthKey() = default;

    MonthKey(int y, int m) : year(y), month(m) {
        if (m < 1 || m > 12) {
            throw DomainError("month out of range 1..12: " + std::to_string(m));
        }
    }

    auto operator<=>(const MonthKey&) const = default;

    /// Linear month index; the anchor is arbitrary but fixed.
    long long ordinal() const { return static_cast<long long>(year) * 12 + (month - 1); }

    static MonthKey from_ordinal(long long ord) {
        long long y = ord / 12;
        long long m = ord % 12;
        if (m < 0) {
            m += 12;
            y -= 1;
        }
        return MonthKey(static_cast<int>(y), static_cast<int>(m) + 1);
    }

    MonthKey plus_months(long long n) const { return from_ordinal(ordinal() + n); }

    MonthKey successor() const { return plus_months(1); }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return std::string(buf);
    }
};

/// Exact signed distance in months from `a` to `b`.
inline long long months_between(const MonthKey& a, const MonthKey& b) {
    return b.ordinal() - a.ordinal();
}

/// Parses "YYYY-MM". Throws ParseError on anything else.
inline MonthKey parse_month(const std::string& text) {
    int y = 0;
    int m = 0;
    char trailing = 0;
    if (std::sscanf(text.c_str(), "%d-%d%c", &y, &m, &trailing) != 2 || m < 1 || m > 12) {
        throw ParseError("expected month as YYYY-MM, got '" + text + "'");
    }
    return MonthKey(y, m);
}

}  // namespace retrend
