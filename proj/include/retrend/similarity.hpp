#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace retrend {

namespace detail {

/// Decodes UTF-8 into codepoints; a malformed byte stands as its own codepoint.
inline std::vector<std::uint32_t> decode_utf8(std::string_view text) {
    std::vector<std::uint32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::uint32_t cp = c;
        std::size_t extra = 0;
        if (c >= 0xF0) {
            cp = c & 0x07u;
            extra = 3;
        } else if (c >= 0xE0) {
            cp = c & 0x0Fu;
            extra = 2;
        } else if (c >= 0xC0) {
            cp = c & 0x1Fu;
            extra = 1;
        }
        if (extra > 0) {
            if (i + extra >= text.size()) {
                out.push_back(c);
                ++i;
                continue;
            }
            bool ok = true;
            std::uint32_t acc = cp;
            for (std::size_t k = 1; k <= extra; ++k) {
                const unsigned char cc = static_cast<unsigned char>(text[i + k]);
                if ((cc & 0xC0u) != 0x80u) {
                    ok = false;
                    break;
                }
                acc = (acc << 6) | (cc & 0x3Fu);
            }
            if (!ok) {
                out.push_back(c);
                ++i;
                continue;
            }
            out.push_back(acc);
            i += extra + 1;
            continue;
        }
        out.push_back(cp);
        ++i;
    }
    return out;
}

inline bool is_space_codepoint(std::uint32_t cp) {
    return cp == 0x20 || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x3000;
}

/// Compatibility fold for the Latin-1 Supplement and Latin Extended-A
/// letters that dominate music catalogs; returns nullptr for anything
/// outside those blocks.
inline const char* fold_latin_letter(std::uint32_t cp) {
    switch (cp) {
        case 0x00C6: case 0x00E6: return "ae";
        case 0x00DE: case 0x00FE: return "th";
        case 0x00DF: return "ss";
        case 0x0132: case 0x0133: return "ij";
        case 0x0152: case 0x0153: return "oe";
        default: break;
    }
    auto in = [cp](std::uint32_t lo, std::uint32_t hi) { return cp >= lo && cp <= hi; };
    if (in(0xC0, 0xC5) || in(0xE0, 0xE5) || in(0x100, 0x105)) return "a";
    if (cp == 0xC7 || cp == 0xE7 || in(0x106, 0x10D)) return "c";
    if (cp == 0xD0 || cp == 0xF0 || in(0x10E, 0x111)) return "d";
    if (in(0xC8, 0xCB) || in(0xE8, 0xEB) || in(0x112, 0x11B)) return "e";
    if (in(0x11C, 0x123)) return "g";
    if (in(0x124, 0x127)) return "h";
    if (in(0xCC, 0xCF) || in(0xEC, 0xEF) || in(0x128, 0x131)) return "i";
    if (in(0x134, 0x135)) return "j";
    if (in(0x136, 0x138)) return "k";
    if (in(0x139, 0x142)) return "l";
    if (cp == 0xD1 || cp == 0xF1 || in(0x143, 0x14B)) return "n";
    if (in(0xD2, 0xD6) || cp == 0xD8 || in(0xF2, 0xF6) || cp == 0xF8 || in(0x14C, 0x151)) return "o";
    if (in(0x154, 0x159)) return "r";
    if (in(0x15A, 0x161) || cp == 0x17F) return "s";
    if (in(0x162, 0x167)) return "t";
    if (in(0xD9, 0xDC) || in(0xF9, 0xFC) || in(0x168, 0x173)) return "u";
    if (in(0x174, 0x175)) return "w";
    if (cp == 0xDD || cp == 0xFD || cp == 0xFF || in(0x176, 0x178)) return "y";
    if (in(0x179, 0x17E)) return "z";
    return nullptr;
}

}  // namespace detail

/**
 * Matching key for fuzzy comparison: case fold, accent-compatibility fold,
 * whitespace runs collapsed to single spaces, edges trimmed.
 */
inline std::vector<std::uint32_t> normalize_for_match(std::string_view text) {
    std::vector<std::uint32_t> out;
    bool pending_space = false;
    for (std::uint32_t cp : detail::decode_utf8(text)) {
        if (detail::is_space_codepoint(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (cp >= 'A' && cp <= 'Z') {
            out.push_back(cp + 32);
        } else if (const char* folded = detail::fold_latin_letter(cp)) {
            for (const char* q = folded; *q; ++q) out.push_back(static_cast<std::uint32_t>(*q));
        } else {
            out.push_back(cp);
        }
    }
    return out;
}

/**
 * Ratcliff-Obershelp ratio 2M / (|a| + |b|): M is the total length of
 * matching blocks found by longest-match recursion on both flanks.
 * Two empty sequences compare as 1.0 by convention.
 */
inline double sequence_ratio(const std::vector<std::uint32_t>& a,
                             const std::vector<std::uint32_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    std::unordered_map<std::uint32_t, std::vector<std::size_t>> b_positions;
    for (std::size_t j = 0; j < b.size(); ++j) b_positions[b[j]].push_back(j);

    // Longest block within a[alo,ahi) x b[blo,bhi); ties break to the
    // earliest start in a, then in b.
    auto longest_match = [&](std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) {
        struct Block {
            std::size_t a_start, b_start, size;
        };
        Block best{alo, blo, 0};
        std::unordered_map<std::size_t, std::size_t> run_lengths;
        for (std::size_t i = alo; i < ahi; ++i) {
            std::unordered_map<std::size_t, std::size_t> next_runs;
            auto it = b_positions.find(a[i]);
            if (it != b_positions.end()) {
                for (std::size_t j : it->second) {
                    if (j < blo) continue;
                    if (j >= bhi) break;
                    std::size_t k = 1;
                    if (j > blo) {
                        auto f = run_lengths.find(j - 1);
                        if (f != run_lengths.end()) k = f->second + 1;
                    }
                    next_runs[j] = k;
                    if (k > best.size) best = Block{i - k + 1, j - k + 1, k};
                }
            }
            run_lengths = std::move(next_runs);
        }
        return best;
    };

    std::size_t matched = 0;
    std::vector<std::array<std::size_t, 4>> pending{{0, a.size(), 0, b.size()}};
    while (!pending.empty()) {
        const auto [alo, ahi, blo, bhi] = pending.back();
        pending.pop_back();
        if (alo >= ahi || blo >= bhi) continue;
        const auto block = longest_match(alo, ahi, blo, bhi);
        if (block.size == 0) continue;
        matched += block.size;
        pending.push_back({alo, block.a_start, blo, block.b_start});
        pending.push_back({block.a_start + block.size, ahi, block.b_start + block.size, bhi});
    }
    return 2.0 * static_cast<double>(matched) / static_cast<double>(a.size() + b.size());
}

/// Normalized fuzzy similarity in [0, 1] between two names.
inline double string_similarity(std::string_view a, std::string_view b) {
    return sequence_ratio(normalize_for_match(a), normalize_for_match(b));
}

}  // namespace retrend
