#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "retrend/errors.hpp"
#include "retrend/month.hpp"
#include "retrend/series.hpp"

namespace retrend {

/// Freebase MID grammar still accepted by the Trends frontend.
inline bool is_valid_mid(std::string_view mid) {
    return mid.size() > 3 && (mid.substr(0, 3) == "/m/" || mid.substr(0, 3) == "/g/");
}

/// A cached search-interest series keyed by its Freebase MID.
struct TrendsRecord {
    std::string mid;
    MonthlySeries series;
    std::int64_t fetched_at = 0;  // unix seconds

    TrendsRecord() = default;

    TrendsRecord(std::string mid_, MonthlySeries series_, std::int64_t fetched_at_)
        : mid(std::move(mid_)), series(std::move(series_)), fetched_at(fetched_at_) {
        if (!is_valid_mid(mid)) {
            throw DomainError("not a Freebase MID: '" + mid + "'");
        }
    }
};

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t nl = text.find('\n', begin);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(begin));
            break;
        }
        lines.emplace_back(text.substr(begin, nl - begin));
        begin = nl + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    return lines;
}

inline long parse_trends_value(const std::string& cell, std::size_t line_no) {
    if (cell == "<1") return 0;  // sub-unit interest in real exports
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0') {
        throw ParseError("line " + std::to_string(line_no) + ": bad interest value '" + cell + "'");
    }
    if (v < 0 || v > 100) {
        throw RangeError("line " + std::to_string(line_no) + ": value " + std::to_string(v) +
                         " outside [0, 100]");
    }
    return v;
}

}  // namespace detail

/**
 * Parses a Google-Trends-style monthly CSV export.
 *
 * Leading header lines (category banner, blank separators, optional BOM) are
 * skipped until the "Month,..." column header; after that every row must be
 * "YYYY-MM,value" for consecutive months. "<1" cells parse as 0. Missing
 * months, out-of-order months, and values outside [0, 100] are hard errors.
 */
inline TrendsRecord parse_trends_csv(std::string_view csv, const std::string& mid,
                                     std::int64_t fetched_at = 0) {
    if (!is_valid_mid(mid)) {
        throw DomainError("not a Freebase MID: '" + mid + "'");
    }
    if (csv.size() >= 3 && csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);

    const auto lines = detail::split_lines(csv);
    std::size_t row = 0;
    bool header_seen = false;
    for (; row < lines.size(); ++row) {
        if (lines[row].rfind("Month,", 0) == 0) {
            header_seen = true;
            ++row;
            break;
        }
    }
    if (!header_seen) {
        throw ParseError("no 'Month,...' header row found");
    }

    MonthKey start;
    std::vector<double> values;
    for (; row < lines.size(); ++row) {
        const std::string& line = lines[row];
        if (line.empty()) {
            if (values.empty()) continue;
            break;  // blank line ends the data section
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("line " + std::to_string(row + 1) + ": expected 'YYYY-MM,value'");
        }
        MonthKey month;
        try {
            month = parse_month(line.substr(0, comma));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(row + 1) + ": " + e.what());
        }
        const long value = detail::parse_trends_value(line.substr(comma + 1), row + 1);
        if (values.empty()) {
            start = month;
        } else {
            const MonthKey expected = start.plus_months(static_cast<long long>(values.size()));
            if (month == expected) {
                // contiguous, fall through
            } else if (month > expected) {
                throw GapError("missing month " + expected.str() + " before " + month.str());
            } else {
                throw OrderError("month " + month.str() + " out of order after " +
                                 start.plus_months(static_cast<long long>(values.size()) - 1).str());
            }
        }
        values.push_back(static_cast<double>(value));
    }
    if (values.empty()) {
        throw ParseError("no data rows after the 'Month,...' header");
    }
    return TrendsRecord(mid, MonthlySeries(mid, start, std::move(values)), fetched_at);
}

/// Canonical JSON envelope; parse(serialize(r)) reproduces r bitwise.
inline std::string serialize_trends_record(const TrendsRecord& record) {
    nlohmann::json doc;
    doc["mid"] = record.mid;
    doc["start"] = record.series.start.str();
    doc["values"] = record.series.values;
    doc["fetched_at"] = record.fetched_at;
    return doc.dump();
}

inline TrendsRecord parse_trends_envelope(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad trends envelope: ") + e.what());
    }
    try {
        const std::string mid = doc.at("mid").get<std::string>();
        const MonthKey start = parse_month(doc.at("start").get<std::string>());
        std::vector<double> values = doc.at("values").get<std::vector<double>>();
        const std::int64_t fetched_at = doc.at("fetched_at").get<std::int64_t>();
        return TrendsRecord(mid, MonthlySeries(mid, start, std::move(values)), fetched_at);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad trends envelope: ") + e.what());
    }
}

}  // namespace retrend
