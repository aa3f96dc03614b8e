#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "retrend/cache.hpp"
#include "retrend/config.hpp"
#include "retrend/errors.hpp"
#include "retrend/graph.hpp"
#include "retrend/rng.hpp"
#include "retrend/series.hpp"

namespace retrend {

/// Shapes a scenario pair can take. Every kind yields a full borrowee pulse
/// series; the borrowed series is what varies.
enum class PairShape {
    planted,        // borrowed follows an explicit jump-model beta vector
    revival,        // borrowed tracks the borrowee pulse with a one-month lag
    flat,           // borrowed is baseline noise, no effect
    all_zero,       // borrowed is silent everywhere
    zero_baseline,  // borrowed silent before the release, ramps after
};

struct ScenarioPair {
    PairShape shape = PairShape::flat;
    bool unlinked = false;  // borrowed song gets no knowledge-base entry
    std::array<double, 4> beta{20.0, 0.0, 0.0, 0.0};
    double sigma = 0.5;
    double coupling = 0.8;
    double baseline = 20.0;
    BorrowKind borrow = BorrowKind::sample;
    std::optional<MonthKey> release;  // overrides the scenario release
};

/**
 * Description of a synthetic dataset: a handful of borrowing pairs with
 * known ground truth, written out in exactly the formats the pipeline
 * ingests. Scenario files use the same key = value format as run configs.
 */
struct SynthScenario {
    std::uint64_t seed = 42;
    MonthKey start{2013, 6};
    int months = 36;
    MonthKey release{2014, 12};
    double alpha = 0.05;
    int max_lag = 10;
    std::string granger_mode = "windowed";
    unsigned jobs = 1;
    std::vector<ScenarioPair> pairs;

    static SynthScenario from_file(const std::filesystem::path& path) {
        const KeyValueFile kv = KeyValueFile::load(path);
        SynthScenario scenario;
        std::size_t pair_count = 0;
        for (const auto& [key, value] : kv.values()) {
            if (key.rfind("pair.", 0) == 0) {
                const std::size_t dot = key.find('.', 5);
                if (dot == std::string::npos) {
                    throw ConfigError(path.string() + ": malformed pair key '" + key + "'");
                }
                std::size_t index = 0;
                try {
                    index = static_cast<std::size_t>(std::stoul(key.substr(5, dot - 5)));
                } catch (const std::exception&) {
                    throw ConfigError(path.string() + ": malformed pair key '" + key + "'");
                }
                if (index == 0) throw ConfigError(path.string() + ": pair indices start at 1");
                pair_count = std::max(pair_count, index);
                continue;  // fields handled after sizing
            }
            if (key != "seed" && key != "start" && key != "months" && key != "release" &&
                key != "alpha" && key != "max_lag" && key != "granger_mode" && key != "jobs") {
                throw ConfigError(path.string() + ": unknown key '" + key + "'");
            }
        }

        if (auto v = kv.get("seed")) scenario.seed = std::stoull(*v);
        if (auto v = kv.get("start")) scenario.start = parse_month(*v);
        if (auto v = kv.get("months")) scenario.months = std::stoi(*v);
        if (auto v = kv.get("release")) scenario.release = parse_month(*v);
        if (auto v = kv.get("alpha")) scenario.alpha = std::stod(*v);
        if (auto v = kv.get("max_lag")) scenario.max_lag = std::stoi(*v);
        if (auto v = kv.get("granger_mode")) scenario.granger_mode = *v;
        if (auto v = kv.get("jobs")) scenario.jobs = static_cast<unsigned>(std::stoul(*v));
        if (scenario.months < 1) throw ConfigError("months must be positive");
        if (pair_count == 0) throw ConfigError(path.string() + ": no pair.<n>.* keys");

        scenario.pairs.resize(pair_count);
        for (std::size_t i = 1; i <= pair_count; ++i) {
            const std::string prefix = "pair." + std::to_string(i) + ".";
            ScenarioPair& pair = scenario.pairs[i - 1];
            const auto kind = kv.get(prefix + "kind");
            if (!kind) {
                throw ConfigError(path.string() + ": pair " + std::to_string(i) +
                                  " is missing '" + prefix + "kind'");
            }
            if (*kind == "planted") {
                pair.shape = PairShape::planted;
            } else if (*kind == "revival") {
                pair.shape = PairShape::revival;
            } else if (*kind == "flat") {
                pair.shape = PairShape::flat;
            } else if (*kind == "all_zero") {
                pair.shape = PairShape::all_zero;
            } else if (*kind == "zero_baseline") {
                pair.shape = PairShape::zero_baseline;
            } else {
                throw ConfigError(path.string() + ": unknown pair kind '" + *kind + "'");
            }
            if (auto v = kv.get(prefix + "unlinked")) pair.unlinked = (*v == "true");
            if (auto v = kv.get(prefix + "sigma")) pair.sigma = std::stod(*v);
            if (pair.sigma < 0.0) throw ConfigError("sigma must be non-negative");
            if (auto v = kv.get(prefix + "coupling")) pair.coupling = std::stod(*v);
            if (auto v = kv.get(prefix + "baseline")) pair.baseline = std::stod(*v);
            if (auto v = kv.get(prefix + "release")) pair.release = parse_month(*v);
            if (auto v = kv.get(prefix + "borrow")) {
                auto borrow = parse_borrow_kind(*v);
                if (!borrow) throw ConfigError("unknown borrow kind '" + *v + "'");
                pair.borrow = *borrow;
            }
            if (auto v = kv.get(prefix + "beta")) {
                std::array<double, 4> beta{};
                std::size_t slot = 0;
                std::string item;
                for (char c : *v + ",") {
                    if (c == ',') {
                        if (slot >= 4) throw ConfigError("beta needs exactly 4 components");
                        beta[slot++] = std::stod(KeyValueFile::trim(item));
                        item.clear();
                    } else {
                        item.push_back(c);
                    }
                }
                if (slot != 4) throw ConfigError("beta needs exactly 4 components");
                pair.beta = beta;
            }
        }
        return scenario;
    }
};

namespace detail {

inline double clip_non_negative(double v) { return v < 0.0 ? 0.0 : v; }

/// Borrowee pulse: silent until its release, then a spike decaying
/// geometrically, the usual shape of interest in a brand-new song.
inline std::vector<double> gen_borrowee_values(const SynthScenario& scenario, long long release_idx,
                                               CounterRng& rng) {
    std::vector<double> values(static_cast<std::size_t>(scenario.months), 0.0);
    for (long long i = 0; i < scenario.months; ++i) {
        const long long rel = i - release_idx;
        if (rel < 0) continue;
        double v = 100.0 * std::pow(0.8, static_cast<double>(rel));
        if (rel > 0) v += 1.0 * rng.next_gaussian();
        values[static_cast<std::size_t>(i)] = clip_non_negative(v);
    }
    return values;
}

inline std::vector<double> gen_borrowed_values(const SynthScenario& scenario,
                                               const ScenarioPair& pair, long long release_idx,
                                               const std::vector<double>& borrowee,
                                               CounterRng& rng) {
    std::vector<double> values(static_cast<std::size_t>(scenario.months), 0.0);
    for (long long i = 0; i < scenario.months; ++i) {
        const long long t = i - release_idx;
        double v = 0.0;
        switch (pair.shape) {
            case PairShape::planted:
                v = pair.beta[0] + pair.beta[1] * static_cast<double>(t);
                if (t > 0) v += pair.beta[2] + pair.beta[3] * static_cast<double>(t);
                v += pair.sigma * rng.next_gaussian();
                break;
            case PairShape::revival: {
                v = pair.baseline;
                if (t > 0 && i >= 1) v += pair.coupling * borrowee[static_cast<std::size_t>(i - 1)];
                v += pair.sigma * rng.next_gaussian();
                break;
            }
            case PairShape::flat:
                v = pair.baseline + pair.sigma * rng.next_gaussian();
                break;
            case PairShape::all_zero:
                v = 0.0;
                break;
            case PairShape::zero_baseline:
                if (t > 0) v = 4.0 * static_cast<double>(t) + pair.sigma * rng.next_gaussian();
                break;
        }
        values[static_cast<std::size_t>(i)] = clip_non_negative(v);
    }
    return values;
}

}  // namespace detail

/// Files written by generate_dataset, all under one directory.
struct GeneratedDataset {
    std::filesystem::path dir;
    std::filesystem::path edges;
    std::filesystem::path songs;
    std::filesystem::path fixture;
    std::filesystem::path cache_dir;
    std::filesystem::path config;
};

/**
 * Materializes a scenario as a runnable dataset: song table, edge list,
 * entity-link fixture, series cache, and a ready config.ini pointing at all
 * of them. Deterministic for a fixed scenario.
 */
inline GeneratedDataset generate_dataset(const SynthScenario& scenario,
                                         const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create dataset directory " + dir.string());

    GeneratedDataset paths;
    paths.dir = dir;
    paths.edges = dir / "edges.tsv";
    paths.songs = dir / "songs.tsv";
    paths.fixture = dir / "fixture.json";
    paths.cache_dir = dir / "cache";
    paths.config = dir / "config.ini";

    std::ofstream edges(paths.edges, std::ios::trunc);
    std::ofstream songs(paths.songs, std::ios::trunc);
    if (!edges || !songs) throw IoError("cannot write dataset files under " + dir.string());
    edges << "# borrowed_id\tborrowee_id\tkind\trelease\n";
    songs << "# song_id\ttitle\tartist\trelease\n";

    nlohmann::ordered_json fixture;
    fixture["search_results"] = nlohmann::ordered_json::object();
    fixture["entities"] = nlohmann::ordered_json::object();
    TrendsCache cache(paths.cache_dir);

    for (std::size_t k = 0; k < scenario.pairs.size(); ++k) {
        const ScenarioPair& pair = scenario.pairs[k];
        const std::string n = std::to_string(k + 1);
        const MonthKey release = pair.release.value_or(scenario.release);
        const long long release_idx = months_between(scenario.start, release);

        const std::string borrowed_id = "orig-" + n;
        const std::string borrowee_id = "deriv-" + n;
        const std::string borrowed_title = "Original Song " + n;
        const std::string borrowed_artist = "Original Artist " + n;
        const std::string borrowee_title = "Derived Song " + n;
        const std::string borrowee_artist = "Derived Artist " + n;
        const std::string borrowed_mid = "/m/syn" + n + "o";
        const std::string borrowee_mid = "/m/syn" + n + "d";

        songs << borrowed_id << '\t' << borrowed_title << '\t' << borrowed_artist << "\t\n";
        songs << borrowee_id << '\t' << borrowee_title << '\t' << borrowee_artist << '\t'
              << release.str() << '\n';
        edges << borrowed_id << '\t' << borrowee_id << '\t' << to_string(pair.borrow) << '\t'
              << release.str() << '\n';

        CounterRng borrowee_rng(derive_seed(scenario.seed, 100 + k));
        CounterRng borrowed_rng(derive_seed(scenario.seed, 200 + k));
        const auto borrowee_values = detail::gen_borrowee_values(scenario, release_idx, borrowee_rng);
        const auto borrowed_values =
            detail::gen_borrowed_values(scenario, pair, release_idx, borrowee_values, borrowed_rng);
        cache.put(TrendsRecord(borrowed_mid,
                               MonthlySeries(borrowed_mid, scenario.start, borrowed_values), 0));
        cache.put(TrendsRecord(borrowee_mid,
                               MonthlySeries(borrowee_mid, scenario.start, borrowee_values), 0));

        auto add_entity = [&](const std::string& kb_id, const std::string& title,
                              const std::string& artist, const std::string& mid) {
            fixture["search_results"][title] = nlohmann::ordered_json::array({kb_id});
            fixture["search_results"][artist] = nlohmann::ordered_json::array({kb_id});
            fixture["search_results"][title + " " + artist] = nlohmann::ordered_json::array({kb_id});
            fixture["entities"][kb_id] = {{"label", title},
                                          {"artist_label", artist},
                                          {"class_ids", {"Q7366"}},
                                          {"freebase_mid", mid}};
        };
        if (!pair.unlinked) {
            add_entity("QS" + n + "O", borrowed_title, borrowed_artist, borrowed_mid);
        }
        add_entity("QS" + n + "D", borrowee_title, borrowee_artist, borrowee_mid);
    }

    {
        std::ofstream out(paths.fixture, std::ios::trunc);
        if (!out) throw IoError("cannot write " + paths.fixture.string());
        out << fixture.dump(2) << '\n';
    }
    {
        std::ofstream out(paths.config, std::ios::trunc);
        if (!out) throw IoError("cannot write " + paths.config.string());
        out << "edges = edges.tsv\n"
            << "songs = songs.tsv\n"
            << "fixture = fixture.json\n"
            << "cache_dir = cache\n"
            << "out_dir = out\n"
            << "alpha = " << scenario.alpha << "\n"
            << "max_lag = " << scenario.max_lag << "\n"
            << "granger_mode = " << scenario.granger_mode << "\n"
            << "jobs = " << scenario.jobs << "\n";
    }
    return paths;
}

}  // namespace retrend
