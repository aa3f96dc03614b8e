#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "retrend/errors.hpp"
#include "retrend/graph.hpp"
#include "retrend/similarity.hpp"

namespace retrend {

/// Knowledge-base entity returned by a search, with the properties the
/// class filter and the Trends lookup need.
struct EntityCandidate {
    std::string kb_id;
    std::string label;
    std::optional<std::string> artist_label;
    std::vector<std::string> class_ids;  // values of the instance-of property
    std::optional<std::string> freebase_mid;
};

struct MatchDecision {
    std::string song_id;
    std::string kb_id;
    double title_similarity = 0.0;
    double artist_similarity = 0.0;
    bool accepted = false;
    std::optional<std::string> freebase_mid;  // carried along for the Trends step
};

/// Pluggable entity search backend. Implementations must be safe for
/// concurrent callers; resolve_song never touches the network itself.
class EntitySource {
public:
    virtual ~EntitySource() = default;

    /// Ranked entity ids for a free-text query. Empty result is not an error.
    virtual std::vector<std::string> search(const std::string& query) = 0;

    /// Properties for up to a batch of ids; unknown ids are simply absent.
    virtual std::vector<EntityCandidate> fetch(const std::vector<std::string>& ids) = 0;
};

/// Musical work plus the common subclasses seen on real song entities.
inline const std::set<std::string>& default_allowed_classes() {
    static const std::set<std::string> classes = {
        "Q2188189",    // musical work
        "Q7366",       // song
        "Q204370",     // musical composition
        "Q105543609",  // musical work/composition
        "Q134556",     // single
    };
    return classes;
}

struct ResolveOptions {
    double threshold = 0.55;  // both similarities must be strictly above this
    std::size_t top_k = 10;
    std::size_t batch_size = 50;
    std::set<std::string> allowed_classes = default_allowed_classes();
};

/**
 * Offline entity source backed by a JSON dump:
 *   { "search_results": { "<query>": ["Q1", ...] },
 *     "entities": { "Q1": { "label": ..., "artist_label": ...,
 *                           "class_ids": [...], "freebase_mid": ... } } }
 * Used by every test; the HTTP source shares the interface.
 */
class FixtureEntitySource : public EntitySource {
public:
    static FixtureEntitySource from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open fixture file " + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("fixture " + path + ": " + e.what());
        }
        return FixtureEntitySource(doc);
    }

    explicit FixtureEntitySource(const nlohmann::json& doc) {
        if (!doc.is_object()) throw ParseError("fixture root must be an object");
        if (doc.contains("search_results")) {
            for (const auto& [query, ids] : doc.at("search_results").items()) {
                std::vector<std::string> list;
                for (const auto& id : ids) list.push_back(id.get<std::string>());
                search_results_[query] = std::move(list);
            }
        }
        if (doc.contains("entities")) {
            for (const auto& [kb_id, body] : doc.at("entities").items()) {
                EntityCandidate candidate;
                candidate.kb_id = kb_id;
                candidate.label = body.value("label", std::string{});
                if (body.contains("artist_label") && !body.at("artist_label").is_null()) {
                    candidate.artist_label = body.at("artist_label").get<std::string>();
                }
                if (body.contains("class_ids")) {
                    for (const auto& c : body.at("class_ids")) {
                        candidate.class_ids.push_back(c.get<std::string>());
                    }
                }
                if (body.contains("freebase_mid") && !body.at("freebase_mid").is_null()) {
                    candidate.freebase_mid = body.at("freebase_mid").get<std::string>();
                }
                entities_[kb_id] = std::move(candidate);
            }
        }
    }

    std::vector<std::string> search(const std::string& query) override {
        auto it = search_results_.find(query);
        return it == search_results_.end() ? std::vector<std::string>{} : it->second;
    }

    std::vector<EntityCandidate> fetch(const std::vector<std::string>& ids) override {
        std::vector<EntityCandidate> out;
        for (const auto& id : ids) {
            auto it = entities_.find(id);
            if (it != entities_.end()) out.push_back(it->second);
        }
        return out;
    }

private:
    std::unordered_map<std::string, std::vector<std::string>> search_results_;
    std::unordered_map<std::string, EntityCandidate> entities_;
};

/**
 * Resolves a song to knowledge-base entities: three queries (title, artist,
 * title + artist), top ten candidates each, deduplicated, properties fetched
 * in batches of 50, filtered on instance-of class membership and presence
 * of a Freebase MID, then scored on title and artist similarity separately.
 * Acceptance requires both scores strictly above the threshold.
 *
 * Candidates lacking an artist label are surfaced with artist similarity 0
 * rather than guessed at. The decision list is deterministically ordered:
 * accepted first, then by min(title, artist) similarity, then by kb_id.
 */
inline std::vector<MatchDecision> resolve_song(const SongRecord& song, EntitySource& source,
                                               const ResolveOptions& options = {}) {
    std::vector<std::string> candidate_ids;
    std::unordered_set<std::string> seen;
    const std::string queries[3] = {song.title, song.artist, song.title + " " + song.artist};
    for (const auto& query : queries) {
        auto ids = source.search(query);
        if (ids.size() > options.top_k) ids.resize(options.top_k);
        for (auto& id : ids) {
            if (seen.insert(id).second) candidate_ids.push_back(std::move(id));
        }
    }

    std::vector<EntityCandidate> candidates;
    for (std::size_t begin = 0; begin < candidate_ids.size(); begin += options.batch_size) {
        const std::size_t end = std::min(begin + options.batch_size, candidate_ids.size());
        std::vector<std::string> batch(candidate_ids.begin() + static_cast<std::ptrdiff_t>(begin),
                                       candidate_ids.begin() + static_cast<std::ptrdiff_t>(end));
        auto fetched = source.fetch(batch);
        candidates.insert(candidates.end(), fetched.begin(), fetched.end());
    }

    std::vector<MatchDecision> decisions;
    decisions.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        MatchDecision decision;
        decision.song_id = song.song_id;
        decision.kb_id = candidate.kb_id;
        decision.freebase_mid = candidate.freebase_mid;
        decision.title_similarity = string_similarity(song.title, candidate.label);
        decision.artist_similarity =
            candidate.artist_label ? string_similarity(song.artist, *candidate.artist_label) : 0.0;
        const bool class_ok =
            std::any_of(candidate.class_ids.begin(), candidate.class_ids.end(),
                        [&](const std::string& c) { return options.allowed_classes.count(c) > 0; });
        decision.accepted = class_ok && candidate.freebase_mid.has_value() &&
                            decision.title_similarity > options.threshold &&
                            decision.artist_similarity > options.threshold;
        decisions.push_back(std::move(decision));
    }

    std::sort(decisions.begin(), decisions.end(), [](const MatchDecision& a, const MatchDecision& b) {
        if (a.accepted != b.accepted) return a.accepted;
        const double a_min = std::min(a.title_similarity, a.artist_similarity);
        const double b_min = std::min(b.title_similarity, b.artist_similarity);
        if (a_min != b_min) return a_min > b_min;
        return a.kb_id < b.kb_id;
    });
    return decisions;
}

}  // namespace retrend
