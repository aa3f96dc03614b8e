#pragma once

#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "retrend/errors.hpp"
#include "retrend/month.hpp"
#include "retrend/similarity.hpp"

namespace retrend {

enum class BorrowKind { sample, cover, remix };

inline const char* to_string(BorrowKind kind) {
    switch (kind) {
        case BorrowKind::sample: return "sample";
        case BorrowKind::cover: return "cover";
        case BorrowKind::remix: return "remix";
    }
    return "sample";
}

inline std::optional<BorrowKind> parse_borrow_kind(const std::string& text) {
    if (text == "sample") return BorrowKind::sample;
    if (text == "cover") return BorrowKind::cover;
    if (text == "remix") return BorrowKind::remix;
    return std::nullopt;
}

struct SongRecord {
    std::string song_id;
    std::string title;
    std::string artist;
    std::optional<MonthKey> release;
};

/// Directed borrowing: the borrowee reuses material from the borrowed song.
/// `release` is the borrowee's release month, the treatment event.
struct BorrowingEdge {
    std::string borrowed_id;
    std::string borrowee_id;
    BorrowKind kind = BorrowKind::sample;
    MonthKey release;

    bool operator==(const BorrowingEdge&) const = default;
};

namespace detail {

inline std::vector<std::string> split_tsv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        std::size_t tab = line.find('\t', begin);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, tab - begin));
        begin = tab + 1;
    }
    return fields;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace detail

/**
 * Deduplicated directed multigraph of borrowings. Nodes are the union of
 * edge endpoints; per-song edge lists are indexed for O(1) amortized lookup.
 * Immutable once loaded.
 */
class BorrowingGraph {
public:
    const std::vector<BorrowingEdge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t duplicates_dropped() const { return duplicates_dropped_; }

    bool has_song(const std::string& song_id) const { return nodes_.count(song_id) > 0; }

    /// Edges where the song is the borrowed (original) endpoint.
    std::vector<const BorrowingEdge*> edges_of_borrowed(const std::string& song_id) const {
        return collect(by_borrowed_, song_id);
    }

    std::vector<const BorrowingEdge*> edges_of_borrowee(const std::string& song_id) const {
        return collect(by_borrowee_, song_id);
    }

    /**
     * Reads tab-separated records: borrowed_id, borrowee_id, kind, YYYY-MM.
     * '#' starts a comment line; blank lines are skipped. Exact duplicate
     * records collapse to one edge and are counted, not errors.
     */
    static BorrowingGraph load(std::istream& in) {
        BorrowingGraph graph;
        std::unordered_set<std::string> seen;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            line = detail::strip_cr(line);
            if (line.empty() || line[0] == '#') continue;
            auto fields = detail::split_tsv(line);
            if (fields.size() != 4) {
                throw ParseError("line " + std::to_string(line_no) + ": expected 4 tab-separated fields, got " +
                                 std::to_string(fields.size()));
            }
            const std::string& borrowed = fields[0];
            const std::string& borrowee = fields[1];
            if (borrowed.empty() || borrowee.empty()) {
                throw ParseError("line " + std::to_string(line_no) + ": empty song id");
            }
            if (borrowed == borrowee) {
                throw SelfLoopEdge("line " + std::to_string(line_no) + ": song '" + borrowed +
                                   "' borrows from itself");
            }
            auto kind = parse_borrow_kind(fields[2]);
            if (!kind) {
                throw ParseError("line " + std::to_string(line_no) + ": unknown borrowing kind '" +
                                 fields[2] + "'");
            }
            MonthKey release;
            try {
                release = parse_month(fields[3]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }

            const std::string key = borrowed + '\t' + borrowee + '\t' + fields[2] + '\t' + release.str();
            if (!seen.insert(key).second) {
                ++graph.duplicates_dropped_;
                continue;
            }
            graph.add_edge(BorrowingEdge{borrowed, borrowee, *kind, release});
        }
        return graph;
    }

private:
    void add_edge(BorrowingEdge edge) {
        const std::size_t index = edges_.size();
        nodes_.insert(edge.borrowed_id);
        nodes_.insert(edge.borrowee_id);
        by_borrowed_[edge.borrowed_id].push_back(index);
        by_borrowee_[edge.borrowee_id].push_back(index);
        edges_.push_back(std::move(edge));
    }

    std::vector<const BorrowingEdge*> collect(
        const std::unordered_map<std::string, std::vector<std::size_t>>& index,
        const std::string& song_id) const {
        std::vector<const BorrowingEdge*> out;
        auto it = index.find(song_id);
        if (it == index.end()) return out;
        out.reserve(it->second.size());
        for (std::size_t i : it->second) out.push_back(&edges_[i]);
        return out;
    }

    std::vector<BorrowingEdge> edges_;
    std::unordered_set<std::string> nodes_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_borrowed_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_borrowee_;
    std::size_t duplicates_dropped_ = 0;
};

/// Reads the song table: song_id, title, artist[, release YYYY-MM].
/// Titles and artists must be non-empty once normalized for matching.
inline std::vector<SongRecord> load_songs(std::istream& in) {
    std::vector<SongRecord> songs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = detail::split_tsv(line);
        if (fields.size() != 3 && fields.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected song_id, title, artist[, release]");
        }
        SongRecord song;
        song.song_id = fields[0];
        song.title = fields[1];
        song.artist = fields[2];
        if (song.song_id.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty song id");
        }
        if (normalize_for_match(song.title).empty() || normalize_for_match(song.artist).empty()) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": title and artist must be non-empty after normalization");
        }
        if (fields.size() == 4 && !fields[3].empty()) {
            try {
                song.release = parse_month(fields[3]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        songs.push_back(std::move(song));
    }
    return songs;
}

}  // namespace retrend
