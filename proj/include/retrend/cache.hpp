#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "retrend/encoding.hpp"
#include "retrend/errors.hpp"
#include "retrend/trends.hpp"

namespace retrend {

/**
 * On-disk series cache, one JSON envelope per MID, filename the
 * percent-encoded MID. Writes land in a temp file and are moved into place
 * with an atomic rename, so readers never observe a half-written entry;
 * an overwritten entry is archived, not destroyed.
 */
class TrendsCache {
public:
    explicit TrendsCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create cache directory " + dir_.string());
    }

    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path entry_path(const std::string& mid) const {
        return dir_ / (percent_encode(mid) + ".json");
    }

    /// Absent key returns empty. A corrupt entry is evicted (renamed aside)
    /// and reported via CacheCorrupt; the next get treats the key as absent.
    std::optional<TrendsRecord> get(const std::string& mid) const {
        const auto path = entry_path(mid);
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buffer;
        buffer << in.rdbuf();
        try {
            TrendsRecord record = parse_trends_envelope(buffer.str());
            if (record.mid != mid) {
                throw ParseError("envelope mid '" + record.mid + "' does not match key '" + mid + "'");
            }
            return record;
        } catch (const Error& e) {
            in.close();
            std::error_code ec;
            std::filesystem::rename(path, path.string() + ".corrupt", ec);
            throw CacheCorrupt("evicted corrupt cache entry for " + mid + ": " + e.what());
        }
    }

    /// Latest put wins; any previous entry is moved into archive/.
    void put(const TrendsRecord& record) {
        const auto path = entry_path(record.mid);
        const auto tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." +
                         std::to_string(++tmp_counter_);
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write cache temp file " + tmp);
            out << serialize_trends_record(record);
            if (!out.good()) throw IoError("short write to " + tmp);
        }
        if (std::filesystem::exists(path)) {
            archive(path, record.mid);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw IoError("cannot rename " + tmp + " into place: " + ec.message());
    }

private:
    void archive(const std::filesystem::path& path, const std::string& mid) {
        const auto archive_dir = dir_ / "archive";
        std::error_code ec;
        std::filesystem::create_directories(archive_dir, ec);
        if (ec) throw IoError("cannot create " + archive_dir.string());
        const std::string base = percent_encode(mid);
        for (unsigned n = 1;; ++n) {
            auto target = archive_dir / (base + "." + std::to_string(n) + ".json");
            if (!std::filesystem::exists(target)) {
                std::filesystem::rename(path, target, ec);
                if (ec) throw IoError("cannot archive " + path.string() + ": " + ec.message());
                return;
            }
        }
    }

    std::filesystem::path dir_;
    unsigned long tmp_counter_ = 0;
};

}  // namespace retrend
