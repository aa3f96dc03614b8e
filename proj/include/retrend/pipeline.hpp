#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "retrend/cache.hpp"
#include "retrend/config.hpp"
#include "retrend/errors.hpp"
#include "retrend/granger.hpp"
#include "retrend/graph.hpp"
#include "retrend/linking.hpp"
#include "retrend/rdd.hpp"
#include "retrend/series.hpp"

namespace retrend {

enum class Disposition { analyzed, dropped_all_zero, dropped_unlinked, dropped_window, outlier };

inline const char* to_string(Disposition d) {
    switch (d) {
        case Disposition::analyzed: return "analyzed";
        case Disposition::dropped_all_zero: return "dropped_all_zero";
        case Disposition::dropped_unlinked: return "dropped_unlinked";
        case Disposition::dropped_window: return "dropped_window";
        case Disposition::outlier: return "outlier";
    }
    return "analyzed";
}

/**
 * Outcome for one borrowing pair. Every input edge lands in exactly one
 * report; `disposition == analyzed` implies both estimator results are
 * present. The borrowed window rides along so plots can be re-emitted from
 * the report alone.
 */
struct PairReport {
    BorrowingEdge edge;
    Disposition disposition = Disposition::analyzed;
    std::optional<EventWindow> window;
    std::optional<RddFit> rdd;
    std::optional<GrangerResult> granger;
    std::string error;  // non-empty when an estimator raised on this pair
};

struct AteHistogram {
    std::vector<double> log10_abs_edges;  // bin edges over log10(|ATE %|)
    std::vector<long> counts;
    long positive = 0;
    long negative = 0;
};

struct RunSummary {
    std::size_t total_pairs = 0;
    std::size_t analyzed = 0;
    std::size_t dropped_all_zero = 0;
    std::size_t dropped_unlinked = 0;
    std::size_t dropped_window = 0;
    std::size_t outliers = 0;
    std::size_t errored = 0;
    std::size_t rdd_significant_count = 0;
    std::size_t granger_causal_count = 0;
    std::size_t either_causal_count = 0;
    AteHistogram ate_histogram;
};

struct RunResult {
    std::vector<PairReport> reports;
    RunSummary summary;
    std::map<std::string, MatchDecision> links;  // accepted decision per song id
    std::vector<std::string> notes;              // diagnostics, never part of the report bytes
    bool partial_failure = false;
};

namespace detail {

/// Shortest round-trip decimal form, deterministic across runs.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

inline std::string sanitize_for_filename(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

}  // namespace detail

inline nlohmann::ordered_json rdd_to_json(const RddFit& fit) {
    nlohmann::ordered_json j;
    j["beta"] = {fit.beta0_intercept, fit.beta1_trend, fit.beta2_jump, fit.beta3_trend_change};
    j["standard_errors"] = fit.standard_errors;
    j["rss"] = fit.residual_sum_squares;
    j["t_stat_jump"] = fit.t_stat_jump;
    j["p_value_jump"] = fit.p_value_jump;
    j["model_f_stat"] = fit.model_f_stat;
    j["model_p_value"] = fit.model_p_value;
    j["ate_relative_pct"] = fit.ate_relative_pct;  // NaN serializes as null
    j["significant"] = fit.significant;
    j["outlier"] = fit.outlier;
    return j;
}

inline nlohmann::ordered_json granger_to_json(const GrangerResult& result) {
    nlohmann::ordered_json j;
    j["max_lag_requested"] = result.max_lag_requested;
    j["max_lag_used"] = result.max_lag_used;
    nlohmann::ordered_json lags = nlohmann::ordered_json::array();
    for (const auto& entry : result.per_lag) {
        nlohmann::ordered_json lj;
        lj["lag"] = entry.lag;
        lj["f_stat"] = entry.f_stat;
        lj["p_value"] = entry.p_value;
        lj["df1"] = entry.df1;
        lj["df2"] = entry.df2;
        lj["perfect_fit"] = entry.perfect_fit;
        lags.push_back(std::move(lj));
    }
    j["per_lag"] = std::move(lags);
    j["causal"] = result.causal;
    j["perfect_fit_flag"] = result.perfect_fit_flag;
    return j;
}

inline nlohmann::ordered_json report_to_json(const PairReport& report) {
    nlohmann::ordered_json j;
    j["edge"] = {{"borrowed_id", report.edge.borrowed_id},
                 {"borrowee_id", report.edge.borrowee_id},
                 {"kind", to_string(report.edge.kind)},
                 {"release", report.edge.release.str()}};
    j["disposition"] = to_string(report.disposition);
    if (report.window) {
        j["window"] = {{"release", report.window->release.str()},
                       {"pre", report.window->pre},
                       {"post", report.window->post}};
    }
    if (report.rdd) j["rdd"] = rdd_to_json(*report.rdd);
    if (report.granger) j["granger"] = granger_to_json(*report.granger);
    if (!report.error.empty()) j["error"] = report.error;
    return j;
}

/// Reads back the fields the `report` subcommand needs; statistics that
/// serialized as null (NaN/inf) come back as NaN.
inline PairReport report_from_json(const nlohmann::json& j) {
    auto num = [](const nlohmann::json& v) -> double {
        return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
    };
    PairReport report;
    const auto& edge = j.at("edge");
    report.edge.borrowed_id = edge.at("borrowed_id").get<std::string>();
    report.edge.borrowee_id = edge.at("borrowee_id").get<std::string>();
    if (auto kind = parse_borrow_kind(edge.at("kind").get<std::string>())) {
        report.edge.kind = *kind;
    } else {
        throw ParseError("unknown borrowing kind in report");
    }
    report.edge.release = parse_month(edge.at("release").get<std::string>());

    const std::string disposition = j.at("disposition").get<std::string>();
    for (auto d : {Disposition::analyzed, Disposition::dropped_all_zero,
                   Disposition::dropped_unlinked, Disposition::dropped_window,
                   Disposition::outlier}) {
        if (disposition == to_string(d)) report.disposition = d;
    }

    if (j.contains("window")) {
        EventWindow window;
        window.borrowed_id = report.edge.borrowed_id;
        window.borrowee_id = report.edge.borrowee_id;
        window.release = parse_month(j.at("window").at("release").get<std::string>());
        const auto& pre = j.at("window").at("pre");
        const auto& post = j.at("window").at("post");
        for (std::size_t i = 0; i < kWindowHalf; ++i) {
            window.pre[i] = pre.at(i).get<double>();
            window.post[i] = post.at(i).get<double>();
        }
        report.window = window;
    }
    if (j.contains("rdd")) {
        RddFit fit;
        const auto& r = j.at("rdd");
        fit.beta0_intercept = num(r.at("beta").at(0));
        fit.beta1_trend = num(r.at("beta").at(1));
        fit.beta2_jump = num(r.at("beta").at(2));
        fit.beta3_trend_change = num(r.at("beta").at(3));
        for (std::size_t i = 0; i < 4; ++i) fit.standard_errors[i] = num(r.at("standard_errors").at(i));
        fit.residual_sum_squares = num(r.at("rss"));
        fit.t_stat_jump = num(r.at("t_stat_jump"));
        fit.p_value_jump = num(r.at("p_value_jump"));
        fit.model_f_stat = num(r.at("model_f_stat"));
        fit.model_p_value = num(r.at("model_p_value"));
        fit.ate_relative_pct = num(r.at("ate_relative_pct"));
        fit.significant = r.at("significant").get<bool>();
        fit.outlier = r.at("outlier").get<bool>();
        report.rdd = fit;
    }
    if (j.contains("granger")) {
        GrangerResult result;
        const auto& g = j.at("granger");
        result.max_lag_requested = g.at("max_lag_requested").get<int>();
        result.max_lag_used = g.at("max_lag_used").get<int>();
        for (const auto& lj : g.at("per_lag")) {
            GrangerLag entry;
            entry.lag = lj.at("lag").get<int>();
            entry.f_stat = num(lj.at("f_stat"));
            if (lj.at("f_stat").is_null() && lj.value("perfect_fit", false)) {
                entry.f_stat = std::numeric_limits<double>::infinity();
            }
            entry.p_value = num(lj.at("p_value"));
            entry.df1 = lj.at("df1").get<long>();
            entry.df2 = lj.at("df2").get<long>();
            entry.perfect_fit = lj.value("perfect_fit", false);
            result.per_lag.push_back(entry);
        }
        result.causal = g.at("causal").get<bool>();
        result.perfect_fit_flag = g.at("perfect_fit_flag").get<bool>();
        report.granger = result;
    }
    if (j.contains("error")) report.error = j.at("error").get<std::string>();
    return report;
}

/**
 * Tallies a report set. Significance and causality counts cover analyzed
 * pairs only; outlier-disposition pairs are disregarded the way the manual
 * inspection in the source analysis disregarded them. The histogram bins
 * log10(|ATE %|) for the significant analyzed pairs in quarter-decade steps.
 */
inline RunSummary summarize(const std::vector<PairReport>& reports) {
    RunSummary summary;
    summary.total_pairs = reports.size();
    std::vector<double> significant_ates;
    for (const auto& report : reports) {
        switch (report.disposition) {
            case Disposition::analyzed: ++summary.analyzed; break;
            case Disposition::dropped_all_zero: ++summary.dropped_all_zero; break;
            case Disposition::dropped_unlinked: ++summary.dropped_unlinked; break;
            case Disposition::dropped_window: ++summary.dropped_window; break;
            case Disposition::outlier: ++summary.outliers; break;
        }
        if (!report.error.empty()) ++summary.errored;
        if (report.disposition != Disposition::analyzed) continue;
        const bool significant = report.rdd && report.rdd->significant;
        const bool causal = report.granger && report.granger->causal;
        if (significant) ++summary.rdd_significant_count;
        if (causal) ++summary.granger_causal_count;
        if (significant || causal) ++summary.either_causal_count;
        if (significant && report.rdd && std::isfinite(report.rdd->ate_relative_pct)) {
            significant_ates.push_back(report.rdd->ate_relative_pct);
        }
    }

    const std::size_t bucket_total = summary.analyzed + summary.dropped_all_zero +
                                     summary.dropped_unlinked + summary.dropped_window +
                                     summary.outliers;
    if (bucket_total != summary.total_pairs) {
        throw Error("conservation violated: buckets sum to " + std::to_string(bucket_total) +
                    " of " + std::to_string(summary.total_pairs) + " pairs");
    }

    if (!significant_ates.empty()) {
        constexpr double kBin = 0.25;  // quarter decades
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::vector<double> logs;
        for (double ate : significant_ates) {
            if (ate > 0.0) ++summary.ate_histogram.positive;
            if (ate < 0.0) ++summary.ate_histogram.negative;
            const double x = std::log10(std::max(std::abs(ate), 1e-12));
            logs.push_back(x);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        double edge_lo = std::floor(lo / kBin) * kBin;
        double edge_hi = std::ceil(hi / kBin) * kBin;
        if (edge_hi <= edge_lo) edge_hi = edge_lo + kBin;
        const std::size_t bins = static_cast<std::size_t>(std::lround((edge_hi - edge_lo) / kBin));
        summary.ate_histogram.counts.assign(bins, 0);
        for (std::size_t b = 0; b <= bins; ++b) {
            summary.ate_histogram.log10_abs_edges.push_back(edge_lo + kBin * static_cast<double>(b));
        }
        for (double x : logs) {
            std::size_t b = static_cast<std::size_t>((x - edge_lo) / kBin);
            if (b >= bins) b = bins - 1;
            ++summary.ate_histogram.counts[b];
        }
    }
    return summary;
}

inline nlohmann::ordered_json summary_to_json(const RunSummary& summary) {
    nlohmann::ordered_json j;
    j["total_pairs"] = summary.total_pairs;
    j["analyzed"] = summary.analyzed;
    j["dropped_unlinked"] = summary.dropped_unlinked;
    j["dropped_window"] = summary.dropped_window;
    j["dropped_all_zero"] = summary.dropped_all_zero;
    j["outliers"] = summary.outliers;
    j["errored"] = summary.errored;
    j["rdd_significant_count"] = summary.rdd_significant_count;
    j["granger_causal_count"] = summary.granger_causal_count;
    j["either_causal_count"] = summary.either_causal_count;
    j["ate_histogram"] = {{"log10_abs_edges", summary.ate_histogram.log10_abs_edges},
                          {"counts", summary.ate_histogram.counts},
                          {"positive", summary.ate_histogram.positive},
                          {"negative", summary.ate_histogram.negative}};
    return j;
}

/// Resolves every song to its best accepted match. Unmatched songs are
/// simply absent from the returned map.
inline std::map<std::string, MatchDecision> link_songs(const std::vector<SongRecord>& songs,
                                                       EntitySource& source,
                                                       const ResolveOptions& options) {
    std::map<std::string, MatchDecision> links;
    for (const auto& song : songs) {
        auto decisions = resolve_song(song, source, options);
        if (!decisions.empty() && decisions.front().accepted) {
            links.emplace(song.song_id, decisions.front());
        }
    }
    return links;
}

namespace detail {

struct PairContext {
    const PipelineConfig* config = nullptr;
    const std::map<std::string, MatchDecision>* links = nullptr;
    const std::unordered_map<std::string, MonthlySeries>* series_by_mid = nullptr;
};

inline const MonthlySeries* series_for(const PairContext& context, const std::string& song_id) {
    auto link = context.links->find(song_id);
    if (link == context.links->end() || !link->second.freebase_mid) return nullptr;
    auto series = context.series_by_mid->find(*link->second.freebase_mid);
    return series == context.series_by_mid->end() ? nullptr : &series->second;
}

inline PairReport analyze_pair(const BorrowingEdge& edge, const PairContext& context) {
    PairReport report;
    report.edge = edge;

    // Drop rules apply in order: unlinked, window coverage, all-zero, outlier.
    // A song whose series is missing from the cache counts as unlinked: the
    // identifier chain to a usable series is broken either way.
    const MonthlySeries* borrowed_series = series_for(context, edge.borrowed_id);
    const MonthlySeries* borrowee_series = series_for(context, edge.borrowee_id);
    if (!borrowed_series || !borrowee_series) {
        report.disposition = Disposition::dropped_unlinked;
        return report;
    }

    EventWindow borrowed_window;
    EventWindow borrowee_window;
    try {
        borrowed_window = extract_window(*borrowed_series, edge.release);
        borrowee_window = extract_window(*borrowee_series, edge.release);
    } catch (const WindowOutOfRange&) {
        report.disposition = Disposition::dropped_window;
        return report;
    }
    borrowed_window.borrowee_id = edge.borrowee_id;

    // The all-zero filter applies to both endpoints: a silent borrowed
    // window has no outcome to model and a silent borrowee window has no
    // predictive content.
    if (is_all_zero(borrowed_window) || is_all_zero(borrowee_window)) {
        report.disposition = Disposition::dropped_all_zero;
        return report;
    }
    report.window = borrowed_window;

    const double alpha = context.config->alpha;
    try {
        report.rdd = fit_rdd(borrowed_window, alpha);
    } catch (const Error& e) {
        report.error = std::string("rdd: ") + e.what();
        report.disposition = Disposition::analyzed;
        return report;
    }
    if (report.rdd->outlier) {
        report.disposition = Disposition::outlier;
        return report;
    }

    try {
        if (context.config->granger_mode == GrangerMode::windowed) {
            report.granger = granger_test(borrowed_window.flatten(), borrowee_window.flatten(),
                                          context.config->max_lag, alpha);
        } else {
            const AlignedPair aligned = align_common_range(*borrowed_series, *borrowee_series);
            report.granger =
                granger_test(aligned.target, aligned.predictor, context.config->max_lag, alpha);
        }
    } catch (const Error& e) {
        report.error = std::string("granger: ") + e.what();
        GrangerResult empty;
        empty.max_lag_requested = context.config->max_lag;
        empty.max_lag_used = 0;
        report.granger = empty;
    }
    report.disposition = Disposition::analyzed;
    return report;
}

}  // namespace detail

/**
 * End-to-end run: load graph and songs, resolve identifiers, pull series
 * from the cache, then analyze each borrowing pair with a bounded worker
 * pool. Results are keyed by input order, so output bytes are identical
 * whatever the worker count.
 */
inline RunResult run_pipeline(const PipelineConfig& config, EntitySource& source) {
    RunResult result;

    std::ifstream edges_in(config.edges_path);
    if (!edges_in) throw IoError("cannot open edges file " + config.edges_path.string());
    const BorrowingGraph graph = BorrowingGraph::load(edges_in);
    if (graph.duplicates_dropped() > 0) {
        result.notes.push_back("deduplicated " + std::to_string(graph.duplicates_dropped()) +
                               " repeated edge records");
    }

    std::ifstream songs_in(config.songs_path);
    if (!songs_in) throw IoError("cannot open songs file " + config.songs_path.string());
    const std::vector<SongRecord> songs = load_songs(songs_in);

    ResolveOptions options;
    options.threshold = config.similarity_threshold;
    options.allowed_classes = config.allowed_classes;
    result.links = link_songs(songs, source, options);

    TrendsCache cache(config.cache_dir);
    std::unordered_map<std::string, MonthlySeries> series_by_mid;
    for (const auto& [song_id, decision] : result.links) {
        (void)song_id;
        if (!decision.freebase_mid || series_by_mid.count(*decision.freebase_mid)) continue;
        try {
            if (auto record = cache.get(*decision.freebase_mid)) {
                // Peak normalization happens once, on the full fetched
                // series, never again after windowing.
                series_by_mid.emplace(*decision.freebase_mid, normalize_peak(record->series));
            }
        } catch (const CacheCorrupt& e) {
            result.notes.push_back(e.what());
        }
    }

    detail::PairContext context;
    context.config = &config;
    context.links = &result.links;
    context.series_by_mid = &series_by_mid;

    const auto& edges = graph.edges();
    result.reports.resize(edges.size());
    const unsigned jobs =
        config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.jobs;
    if (jobs <= 1 || edges.size() <= 1) {
        for (std::size_t i = 0; i < edges.size(); ++i) {
            result.reports[i] = detail::analyze_pair(edges[i], context);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= edges.size()) break;
                    result.reports[i] = detail::analyze_pair(edges[i], context);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    result.summary = summarize(result.reports);
    for (const auto& report : result.reports) {
        if (!report.error.empty()) result.partial_failure = true;
        if (report.granger && report.granger->max_lag_used < report.granger->max_lag_requested &&
            report.error.empty()) {
            result.notes.push_back("pair " + report.edge.borrowed_id + " -> " +
                                   report.edge.borrowee_id + ": max_lag capped to " +
                                   std::to_string(report.granger->max_lag_used) + " of " +
                                   std::to_string(report.granger->max_lag_requested));
        }
    }
    return result;
}

/// Convenience overload for the default offline entity source.
inline RunResult run_pipeline(const PipelineConfig& config) {
    if (config.fixture_path.empty()) {
        throw ConfigError("no fixture file configured; construct an EntitySource explicitly");
    }
    FixtureEntitySource source = FixtureEntitySource::from_file(config.fixture_path.string());
    return run_pipeline(config, source);
}

inline void write_reports_ldjson(const std::vector<PairReport>& reports, std::ostream& out) {
    for (const auto& report : reports) {
        out << report_to_json(report).dump() << '\n';
    }
}

inline std::vector<PairReport> read_reports_ldjson(std::istream& in) {
    std::vector<PairReport> reports;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            reports.push_back(report_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("report line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return reports;
}

/**
 * Plot-ready CSV emission: one file per fitted pair with observed values and
 * the two fitted segments (24 rows, nothing at t = 0), plus one histogram
 * input file of log-transformed |ATE| with a sign column for the significant
 * pairs.
 */
inline void emit_plot_data(const std::vector<PairReport>& reports,
                           const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create plot directory " + out_dir.string());

    std::size_t index = 0;
    for (const auto& report : reports) {
        const std::size_t pair_index = index++;
        if (!report.window || !report.rdd) continue;
        char prefix[16];
        std::snprintf(prefix, sizeof(prefix), "pair_%03zu_", pair_index);
        const auto path = out_dir / (std::string(prefix) +
                                     detail::sanitize_for_filename(report.edge.borrowed_id) + "__" +
                                     detail::sanitize_for_filename(report.edge.borrowee_id) + ".csv");
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << "t,observed,fitted_pre,fitted_post\n";
        const RddFit& fit = *report.rdd;
        for (std::size_t k = 0; k < 2 * kWindowHalf; ++k) {
            const int t = EventWindow::t_of_index(k);
            out << t << ',' << detail::format_double(report.window->value_at_index(k)) << ',';
            if (t < 0) {
                out << detail::format_double(fit.beta0_intercept + fit.beta1_trend * t) << ',';
            } else {
                out << ',' << detail::format_double((fit.beta0_intercept + fit.beta2_jump) +
                                                    (fit.beta1_trend + fit.beta3_trend_change) * t);
            }
            out << '\n';
        }
    }

    const auto histogram_path = out_dir / "ate_histogram.csv";
    std::ofstream out(histogram_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + histogram_path.string());
    out << "borrowed_id,borrowee_id,ate_relative_pct,log10_abs_ate,sign\n";
    for (const auto& report : reports) {
        if (report.disposition != Disposition::analyzed || !report.rdd) continue;
        if (!report.rdd->significant || !std::isfinite(report.rdd->ate_relative_pct)) continue;
        const double ate = report.rdd->ate_relative_pct;
        out << report.edge.borrowed_id << ',' << report.edge.borrowee_id << ','
            << detail::format_double(ate) << ','
            << detail::format_double(std::log10(std::max(std::abs(ate), 1e-12))) << ','
            << (ate < 0.0 ? "-1" : "1") << '\n';
    }
}

/// Writes reports.ldjson, summary.json and the plots/ directory.
inline void write_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    {
        std::ofstream out(out_dir / "reports.ldjson", std::ios::trunc);
        if (!out) throw IoError("cannot write reports.ldjson");
        write_reports_ldjson(result.reports, out);
    }
    {
        std::ofstream out(out_dir / "summary.json", std::ios::trunc);
        if (!out) throw IoError("cannot write summary.json");
        out << summary_to_json(result.summary).dump(2) << '\n';
    }
    emit_plot_data(result.reports, out_dir / "plots");
}

}  // namespace retrend
