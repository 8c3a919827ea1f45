#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ridepulse/errors.hpp"
#include "ridepulse/text.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

struct FewShotExemplar {
    std::string text;
    TopicCategory category = TopicCategory::Other;
};

inline constexpr const char* kPromptTemplateVersion = "fewshot-prompt/v1";
inline constexpr int kMinExemplarsPerCategory = 1;
inline constexpr int kMaxExemplarsPerCategory = 10;

inline constexpr const char* kClassifierInstruction =
    "You label short transit rider messages with exactly one category. "
    "Reply with the category name only.";

struct PromptSpec {
    std::string instruction;
    std::vector<FewShotExemplar> exemplars;  // canonical category order, k per category
    int exemplars_per_category = 0;
    std::string target_text;
};

/// Load an exemplar pool: JSONL of {text, category}.
inline std::vector<FewShotExemplar> load_exemplars(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::file_unreadable, path);
    std::vector<FewShotExemplar> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j.contains("category"))
            throw Error(errc::malformed_record,
                        "exemplar line " + std::to_string(line_no) + ": expected {text, category}");
        FewShotExemplar ex;
        ex.text = j["text"].get<std::string>();
        auto cat = category_from_name(j["category"].get<std::string>());
        if (ex.text.empty() || !cat)
            throw Error(errc::malformed_record, "exemplar line " + std::to_string(line_no));
        ex.category = *cat;
        out.push_back(std::move(ex));
    }
    return out;
}

/// Deterministic prompt assembly: all four category definitions, exactly k
/// exemplars per category in canonical order (lexicographic within a
/// category, so pool permutations do not change the prompt), then the target.
inline PromptSpec build_prompt(const std::vector<FewShotExemplar>& pool,
                               const std::string& target_text, int k) {
    if (k < kMinExemplarsPerCategory || k > kMaxExemplarsPerCategory)
        throw Error(errc::k_out_of_range, "k = " + std::to_string(k) + ", valid range is [1, 10]");

    PromptSpec spec;
    spec.instruction = kClassifierInstruction;
    spec.exemplars_per_category = k;
    spec.target_text = target_text;

    for (TopicCategory c : kAllCategories) {
        std::vector<const FewShotExemplar*> of_cat;
        for (const auto& ex : pool)
            if (ex.category == c) of_cat.push_back(&ex);
        if (static_cast<int>(of_cat.size()) < k)
            throw Error(errc::insufficient_exemplars,
                        std::string(category_name(c)) + ": have " + std::to_string(of_cat.size()) +
                            ", need " + std::to_string(k));
        std::sort(of_cat.begin(), of_cat.end(),
                  [](const FewShotExemplar* a, const FewShotExemplar* b) { return a->text < b->text; });
        for (int i = 0; i < k; ++i) spec.exemplars.push_back(*of_cat[static_cast<std::size_t>(i)]);
    }
    return spec;
}

inline const char* category_definition(TopicCategory c) {
    switch (c) {
        case TopicCategory::ServiceMaintenance:
            return "cleanliness, upkeep, and physical condition of stations and trains";
        case TopicCategory::Schedule:
            return "timeliness, delays, frequency, and scheduling of trains";
        case TopicCategory::SafetySecurity:
            return "safety or security concerns, incidents, and policing";
        case TopicCategory::Other:
            return "anything that fits none of the other categories";
    }
    return "?";
}

/// Canonical textual rendering of a PromptSpec; byte-identical for identical
/// inputs.
inline std::string render_prompt(const PromptSpec& spec) {
    std::string out;
    out += "Categories:\n";
    for (TopicCategory c : kAllCategories) {
        out += "- ";
        out += category_display_name(c);
        out += ": ";
        out += category_definition(c);
        out += "\n";
    }
    out += "\nExamples:\n";
    for (const auto& ex : spec.exemplars) {
        out += "[";
        out += category_display_name(ex.category);
        out += "] ";
        out += ex.text;
        out += "\n";
    }
    out += "\nMessage: ";
    out += spec.target_text;
    out += "\nCategory:";
    return out;
}

/// Decode a model reply into a category: trims surrounding whitespace and
/// punctuation, case-folds, normalizes separators, and accepts the
/// documented aliases ("safety/security", "others", ...).
inline TopicCategory parse_label(std::string_view response_text) {
    std::string s(response_text);
    // strip surrounding whitespace/punctuation, keep inner structure
    std::size_t b = 0, e = s.size();
    auto is_strippable = [](char c) {
        return is_ascii_space(c) || (c != '\0' && !std::isalnum(static_cast<unsigned char>(c)));
    };
    while (b < e && is_strippable(s[b])) ++b;
    while (e > b && is_strippable(s[e - 1])) --e;
    s = s.substr(b, e - b);
    s = to_lower(s);
    for (char& c : s)
        if (c == '/' || c == '&' || c == '-' || c == '_') c = ' ';
    s = collapse_whitespace(s);

    static const std::unordered_map<std::string, TopicCategory> kAliases = {
        {"service and maintenance", TopicCategory::ServiceMaintenance},
        {"service maintenance", TopicCategory::ServiceMaintenance},
        {"servicemaintenance", TopicCategory::ServiceMaintenance},
        {"maintenance", TopicCategory::ServiceMaintenance},
        {"schedule", TopicCategory::Schedule},
        {"schedules", TopicCategory::Schedule},
        {"safety and security", TopicCategory::SafetySecurity},
        {"safety security", TopicCategory::SafetySecurity},
        {"safetysecurity", TopicCategory::SafetySecurity},
        {"security", TopicCategory::SafetySecurity},
        {"safety", TopicCategory::SafetySecurity},
        {"other", TopicCategory::Other},
        {"others", TopicCategory::Other},
    };
    auto it = kAliases.find(s);
    if (it == kAliases.end())
        throw Error(errc::unparsable_label, "'" + std::string(response_text) + "'");
    return it->second;
}

namespace classify_detail {

// case-folded term-frequency vector over alphanumeric runs
inline std::unordered_map<std::string, double> tf_vector(std::string_view text) {
    std::unordered_map<std::string, double> tf;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tf[cur] += 1.0;
            cur.clear();
        }
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
        } else {
            flush();
        }
    }
    flush();
    return tf;
}

inline double cosine(const std::unordered_map<std::string, double>& a,
                     const std::unordered_map<std::string, double>& b) {
    if (a.empty() || b.empty()) return 0.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    double dot = 0.0;
    for (const auto& [term, w] : small) {
        auto it = large.find(term);
        if (it != large.end()) dot += w * it->second;
    }
    if (dot == 0.0) return 0.0;
    double na = 0.0, nb = 0.0;
    for (const auto& [t, w] : a) na += w * w;
    for (const auto& [t, w] : b) nb += w * w;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace classify_detail

/// Offline fallback, not the few-shot protocol: nearest exemplar by cosine
/// similarity of term-frequency vectors. Ties break toward the canonical
/// category order; a target sharing no vocabulary with any exemplar is
/// Other.
inline TopicCategory classify_local(const std::string& text,
                                    const std::vector<FewShotExemplar>& pool) {
    const auto target = classify_detail::tf_vector(text);
    if (target.empty()) return TopicCategory::Other;

    std::array<double, 4> best_by_cat{0.0, 0.0, 0.0, 0.0};
    for (const auto& ex : pool) {
        const double sim = classify_detail::cosine(target, classify_detail::tf_vector(ex.text));
        auto& best = best_by_cat[static_cast<std::size_t>(ex.category)];
        if (sim > best) best = sim;
    }
    double overall = 0.0;
    TopicCategory winner = TopicCategory::Other;
    bool any = false;
    for (TopicCategory c : kAllCategories) {
        const double sim = best_by_cat[static_cast<std::size_t>(c)];
        if (sim > overall) {
            overall = sim;
            winner = c;
            any = true;
        }
    }
    return any ? winner : TopicCategory::Other;
}

} // namespace ridepulse
