// retrend command line: link songs to knowledge-base entities, analyze
// borrowing pairs, re-emit reports, and synthesize fixture datasets.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "retrend/retrend.hpp"
#include "retrend/wikidata_http.hpp"

namespace {

std::unique_ptr<retrend::EntitySource> make_source(const retrend::PipelineConfig& config) {
    if (!config.fixture_path.empty()) {
        return std::make_unique<retrend::FixtureEntitySource>(
            retrend::FixtureEntitySource::from_file(config.fixture_path.string()));
    }
    retrend::WikidataHttpSource::Options options;
    options.host = *config.endpoint_host;
    options.port = config.endpoint_port;
    options.api_path = config.api_path;
    options.requests_per_second = config.requests_per_second;
    return std::make_unique<retrend::WikidataHttpSource>(options);
}

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_run_meta(const std::filesystem::path& out_dir, const retrend::RunResult& result,
                    std::chrono::system_clock::time_point started,
                    std::chrono::steady_clock::duration elapsed) {
    nlohmann::ordered_json meta;
    meta["started_at"] = iso_timestamp(started);
    meta["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    meta["partial_failure"] = result.partial_failure;
    meta["notes"] = result.notes;
    std::ofstream out(out_dir / "run_meta.json", std::ios::trunc);
    if (out) out << meta.dump(2) << '\n';
}

int run_link(const std::string& config_path, const std::string& out_override) {
    const auto config = retrend::PipelineConfig::from_file(config_path);
    auto source = make_source(config);

    std::ifstream songs_in(config.songs_path);
    if (!songs_in) throw retrend::IoError("cannot open songs file " + config.songs_path.string());
    const auto songs = retrend::load_songs(songs_in);

    retrend::ResolveOptions options;
    options.threshold = config.similarity_threshold;
    options.allowed_classes = config.allowed_classes;
    const auto links = retrend::link_songs(songs, *source, options);

    nlohmann::ordered_json doc;
    nlohmann::ordered_json matched = nlohmann::ordered_json::object();
    for (const auto& [song_id, decision] : links) {
        matched[song_id] = {{"kb_id", decision.kb_id},
                            {"freebase_mid", decision.freebase_mid ? *decision.freebase_mid : ""},
                            {"title_similarity", decision.title_similarity},
                            {"artist_similarity", decision.artist_similarity}};
    }
    doc["matched"] = std::move(matched);
    nlohmann::ordered_json unmatched = nlohmann::ordered_json::array();
    for (const auto& song : songs) {
        if (!links.count(song.song_id)) unmatched.push_back(song.song_id);
    }
    doc["unmatched"] = std::move(unmatched);

    std::filesystem::path out_path =
        out_override.empty() ? config.out_dir / "links.json" : std::filesystem::path(out_override);
    std::filesystem::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw retrend::IoError("cannot write " + out_path.string());
    out << doc.dump(2) << '\n';

    std::cout << "linked " << links.size() << " of " << songs.size() << " songs -> " << out_path
              << "\n";
    return 0;
}

int run_analyze(const std::string& config_path, const std::string& out_override, double alpha,
                int max_lag, const std::string& granger_mode, int jobs) {
    auto config = retrend::PipelineConfig::from_file(config_path);
    if (alpha > 0.0) config.alpha = alpha;
    if (max_lag > 0) config.max_lag = max_lag;
    if (!granger_mode.empty()) {
        if (granger_mode == "windowed") {
            config.granger_mode = retrend::GrangerMode::windowed;
        } else if (granger_mode == "full") {
            config.granger_mode = retrend::GrangerMode::full;
        } else {
            throw retrend::ConfigError("--granger-mode must be 'windowed' or 'full'");
        }
    }
    if (jobs >= 0) config.jobs = static_cast<unsigned>(jobs);
    if (!out_override.empty()) config.out_dir = out_override;

    const auto started = std::chrono::system_clock::now();
    const auto tick = std::chrono::steady_clock::now();
    auto source = make_source(config);
    const auto result = retrend::run_pipeline(config, *source);
    retrend::write_outputs(result, config.out_dir);
    write_run_meta(config.out_dir, result, started, std::chrono::steady_clock::now() - tick);

    const auto& s = result.summary;
    std::cout << "pairs: " << s.total_pairs << "  analyzed: " << s.analyzed
              << "  unlinked: " << s.dropped_unlinked << "  no-window: " << s.dropped_window
              << "  all-zero: " << s.dropped_all_zero << "  outliers: " << s.outliers << "\n"
              << "rdd significant: " << s.rdd_significant_count
              << "  granger causal: " << s.granger_causal_count
              << "  either: " << s.either_causal_count << "\n"
              << "reports -> " << (config.out_dir / "reports.ldjson") << "\n";
    for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
    if (result.partial_failure) {
        std::cerr << "some pairs errored; see the error fields in the report\n";
        return 2;
    }
    return 0;
}

int run_report(const std::string& report_path, const std::string& out_dir) {
    std::ifstream in(report_path);
    if (!in) throw retrend::IoError("cannot open report file " + report_path);
    const auto reports = retrend::read_reports_ldjson(in);
    const auto summary = retrend::summarize(reports);

    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "summary.json", std::ios::trunc);
        if (!out) throw retrend::IoError("cannot write summary.json");
        out << retrend::summary_to_json(summary).dump(2) << '\n';
    }
    retrend::emit_plot_data(reports, dir / "plots");
    std::cout << "re-emitted summary and plot data for " << reports.size() << " pairs -> " << dir
              << "\n";
    return 0;
}

int run_synth(const std::string& scenario_path, const std::string& out_dir) {
    const auto scenario = retrend::SynthScenario::from_file(scenario_path);
    const auto dataset = retrend::generate_dataset(scenario, out_dir);
    std::cout << "dataset with " << scenario.pairs.size() << " pairs -> " << dataset.dir << "\n"
              << "run: retrend analyze --config " << dataset.config << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal analysis of musical borrowings on search interest"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    double alpha = -1.0;
    int max_lag = -1;
    std::string granger_mode;
    int jobs = -1;

    auto* link = app.add_subcommand("link", "resolve songs to knowledge-base identifiers");
    link->add_option("--config", config_path, "run configuration file")->required();
    link->add_option("--out", out_override, "output path for links.json");

    auto* analyze = app.add_subcommand("analyze", "run the full per-pair analysis");
    analyze->add_option("--config", config_path, "run configuration file")->required();
    analyze->add_option("--alpha", alpha, "significance level override");
    analyze->add_option("--max-lag", max_lag, "granger max lag override");
    analyze->add_option("--granger-mode", granger_mode, "windowed or full");
    analyze->add_option("--jobs", jobs, "worker count override (0 = hardware)");
    analyze->add_option("--out", out_override, "output directory override");

    std::string report_path;
    std::string report_out = "out";
    auto* report = app.add_subcommand("report", "re-emit summary and plot data from a report");
    report->add_option("--report", report_path, "reports.ldjson produced by analyze")->required();
    report->add_option("--out", report_out, "output directory");

    std::string scenario_path;
    std::string synth_out = "synth-out";
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset from a scenario");
    synth->add_option("--scenario", scenario_path, "scenario file")->required();
    synth->add_option("--out", synth_out, "dataset directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (link->parsed()) return run_link(config_path, out_override);
        if (analyze->parsed()) {
            return run_analyze(config_path, out_override, alpha, max_lag, granger_mode, jobs);
        }
        if (report->parsed()) return run_report(report_path, report_out);
        if (synth->parsed()) return run_synth(scenario_path, synth_out);
    } catch (const retrend::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const retrend::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
