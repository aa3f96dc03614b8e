#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "retrend/encoding.hpp"
#include "retrend/errors.hpp"
#include "retrend/linking.hpp"

namespace retrend {

/**
 * Entity source speaking the Wikidata action-API dialect over plain HTTP:
 * wbsearchentities for ranked ids, wbgetentities for properties in one
 * batched call, plus a follow-up label fetch that turns performer ids into
 * artist labels. Requests are rate limited across all concurrent callers.
 *
 * Tests run this against an in-process server; nothing in the analysis
 * pipeline requires a live endpoint.
 */
class WikidataHttpSource : public EntitySource {
public:
    struct Options {
        std::string host = "127.0.0.1";
        int port = 80;
        std::string api_path = "/w/api.php";
        std::string language = "en";
        double requests_per_second = 2.0;
        int timeout_seconds = 10;
    };

    explicit WikidataHttpSource(Options options) : options_(std::move(options)) {
        if (options_.requests_per_second <= 0.0) {
            throw DomainError("requests_per_second must be positive");
        }
    }

    std::vector<std::string> search(const std::string& query) override {
        const std::string target = options_.api_path +
                                   "?action=wbsearchentities&format=json&type=item&language=" +
                                   options_.language + "&limit=10&search=" + percent_encode(query);
        const auto doc = get_json(target);
        std::vector<std::string> ids;
        if (doc.contains("search")) {
            for (const auto& hit : doc.at("search")) {
                if (hit.contains("id")) ids.push_back(hit.at("id").get<std::string>());
            }
        }
        return ids;
    }

    std::vector<EntityCandidate> fetch(const std::vector<std::string>& ids) override {
        if (ids.empty()) return {};
        const auto doc = get_entities(ids, "labels|claims");

        std::vector<EntityCandidate> candidates;
        std::vector<std::string> performer_ids;
        std::map<std::string, std::string> performer_of;  // kb_id -> performer id
        if (doc.contains("entities")) {
            for (const auto& id : ids) {
                const auto& entities = doc.at("entities");
                if (!entities.contains(id)) continue;
                const auto& body = entities.at(id);
                if (body.contains("missing")) continue;
                EntityCandidate candidate;
                candidate.kb_id = id;
                candidate.label = label_of(body);
                for (const auto& claim : claims_of(body, "P31")) {
                    if (auto v = item_value(claim); !v.empty()) candidate.class_ids.push_back(v);
                }
                for (const auto& claim : claims_of(body, "P646")) {
                    if (claim.contains("mainsnak") && claim.at("mainsnak").contains("datavalue")) {
                        candidate.freebase_mid =
                            claim.at("mainsnak").at("datavalue").at("value").get<std::string>();
                        break;
                    }
                }
                for (const auto& claim : claims_of(body, "P175")) {
                    if (auto v = item_value(claim); !v.empty()) {
                        performer_of[id] = v;
                        performer_ids.push_back(v);
                        break;  // first listed performer carries the artist name
                    }
                }
                candidates.push_back(std::move(candidate));
            }
        }

        if (!performer_ids.empty()) {
            const auto labels_doc = get_entities(performer_ids, "labels");
            for (auto& candidate : candidates) {
                auto it = performer_of.find(candidate.kb_id);
                if (it == performer_of.end()) continue;
                if (labels_doc.contains("entities") &&
                    labels_doc.at("entities").contains(it->second)) {
                    const std::string label = label_of(labels_doc.at("entities").at(it->second));
                    if (!label.empty()) candidate.artist_label = label;
                }
            }
        }
        return candidates;
    }

private:
    nlohmann::json get_entities(const std::vector<std::string>& ids, const std::string& props) {
        std::string joined;
        for (const auto& id : ids) {
            if (!joined.empty()) joined += "|";
            joined += id;
        }
        const std::string target = options_.api_path + "?action=wbgetentities&format=json&props=" +
                                   percent_encode(props) + "&languages=" + options_.language +
                                   "&ids=" + percent_encode(joined);
        return get_json(target);
    }

    nlohmann::json get_json(const std::string& target) {
        throttle();
        httplib::Client client(options_.host, options_.port);
        client.set_connection_timeout(options_.timeout_seconds);
        client.set_read_timeout(options_.timeout_seconds);
        auto response = client.Get(target);
        if (!response) {
            throw SourceUnavailable("no response from " + options_.host + ":" +
                                    std::to_string(options_.port));
        }
        if (response->status != 200) {
            throw SourceUnavailable("entity endpoint returned HTTP " +
                                    std::to_string(response->status));
        }
        try {
            return nlohmann::json::parse(response->body);
        } catch (const nlohmann::json::exception& e) {
            throw SourceUnavailable(std::string("entity endpoint sent bad JSON: ") + e.what());
        }
    }

    void throttle() {
        using clock = std::chrono::steady_clock;
        const auto interval = std::chrono::duration_cast<clock::duration>(
            std::chrono::duration<double>(1.0 / options_.requests_per_second));
        clock::time_point wait_until;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto now = clock::now();
            wait_until = next_slot_ < now ? now : next_slot_;
            next_slot_ = wait_until + interval;
        }
        std::this_thread::sleep_until(wait_until);
    }

    std::string label_of(const nlohmann::json& body) const {
        if (body.contains("labels") && body.at("labels").contains(options_.language)) {
            return body.at("labels").at(options_.language).value("value", std::string{});
        }
        return {};
    }

    static std::vector<nlohmann::json> claims_of(const nlohmann::json& body,
                                                 const std::string& property) {
        std::vector<nlohmann::json> out;
        if (body.contains("claims") && body.at("claims").contains(property)) {
            for (const auto& claim : body.at("claims").at(property)) out.push_back(claim);
        }
        return out;
    }

    static std::string item_value(const nlohmann::json& claim) {
        if (claim.contains("mainsnak") && claim.at("mainsnak").contains("datavalue")) {
            const auto& value = claim.at("mainsnak").at("datavalue").at("value");
            if (value.contains("id")) return value.at("id").get<std::string>();
        }
        return {};
    }

    Options options_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace retrend
