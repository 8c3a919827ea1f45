#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ridepulse/digest.hpp"
#include "ridepulse/errors.hpp"
#include "ridepulse/text.hpp"

namespace ridepulse {

/// One token of the sentiment dictionary: human-annotated mean valence in
/// [-4, 4] plus the annotation spread kept for format fidelity (unused by
/// scoring).
struct LexiconEntry {
    std::string token;
    double mean_valence = 0.0;
    double std_dev = 0.0;
    std::vector<int> raw_ratings;
};

struct Lexicon {
    std::unordered_map<std::string, LexiconEntry> entries;
    std::string source_digest;
    std::size_t entry_count = 0;
    // lines present in the file but unreachable through case-folded
    // whole-token lookup: non-lowercase spellings and multi-word keys
    std::size_t unreachable_skipped = 0;
    // tokens whose earlier line was superseded by a later one
    std::vector<std::string> duplicates_superseded;

    bool contains(std::string_view folded_token) const {
        return entries.find(std::string(folded_token)) != entries.end();
    }
};

namespace detail {

inline std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

// "[-1, 2, 0, ...]" -> ints; silently yields empty on anything unexpected
inline std::vector<int> parse_rating_list(const std::string& s) {
    std::vector<int> out;
    int value = 0;
    bool in_number = false, negative = false;
    for (char c : s) {
        if (c == '-') {
            negative = true;
        } else if (c >= '0' && c <= '9') {
            value = value * 10 + (c - '0');
            in_number = true;
        } else {
            if (in_number) out.push_back(negative ? -value : value);
            value = 0;
            in_number = false;
            negative = false;
        }
    }
    if (in_number) out.push_back(negative ? -value : value);
    return out;
}

inline bool has_internal_whitespace(std::string_view token) {
    for (char c : token)
        if (is_ascii_space(c)) return true;
    return false;
}

} // namespace detail

/// Load the tab-separated reference lexicon: token TAB mean TAB stddev TAB
/// rating-list. Lookup is by case-folded whole token, so lines whose key is
/// not already folded, or contains whitespace, can never match a token and
/// are skipped. A token listed twice keeps the later line; the superseded
/// line is recorded.
inline Lexicon load_lexicon(const std::string& path) {
    const std::string content = read_file(path);

    Lexicon lex;
    lex.source_digest = fnv1a64_hex(content);

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (start > content.size()) break;
            continue;
        }

        auto cols = detail::split_tabs(line);
        if (cols.size() < 2)
            throw Error(errc::malformed_line, "line " + std::to_string(line_no) + ": expected token<TAB>mean");

        LexiconEntry entry;
        entry.token = cols[0];
        if (!detail::parse_double(cols[1], entry.mean_valence))
            throw Error(errc::malformed_line, "line " + std::to_string(line_no) + ": bad mean value '" + cols[1] + "'");
        if (entry.mean_valence < -4.0 || entry.mean_valence > 4.0)
            throw Error(errc::valence_out_of_range, "token '" + entry.token + "' has mean " + cols[1]);
        if (cols.size() >= 3 && !cols[2].empty()) {
            if (!detail::parse_double(cols[2], entry.std_dev) || entry.std_dev < 0.0)
                throw Error(errc::malformed_line, "line " + std::to_string(line_no) + ": bad stddev '" + cols[2] + "'");
        }
        if (cols.size() >= 4) entry.raw_ratings = detail::parse_rating_list(cols[3]);

        if (detail::has_internal_whitespace(entry.token) || entry.token != to_lower(entry.token)) {
            ++lex.unreachable_skipped;
            continue;
        }

        auto [it, inserted] = lex.entries.try_emplace(entry.token, entry);
        if (!inserted) {
            lex.duplicates_superseded.push_back(entry.token);
            it->second = entry;
        }
    }

    lex.entry_count = lex.entries.size();
    if (lex.entry_count == 0)
        throw Error(errc::empty_lexicon, path);
    return lex;
}

/// Mean valence of the case-folded token, or nullopt when absent.
inline std::optional<double> lookup(const Lexicon& lexicon, std::string_view token) {
    auto it = lexicon.entries.find(to_lower(token));
    if (it == lexicon.entries.end()) return std::nullopt;
    return it->second.mean_valence;
}

} // namespace ridepulse
