#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ridepulse/errors.hpp"
#include "ridepulse/lexicon.hpp"
#include "ridepulse/text.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

/// Tunable constants of the rule engine. Defaults reproduce the published
/// reference scorer; the oracle fixtures pin that behavior.
struct RuleConfig {
    double alpha = 15.0;
    double booster_increment = 0.293;
    double caps_scalar = 0.733;
    double negation_scalar = -0.74;
    double exclamation_step = 0.292;
    int exclamation_cap = 4;
    std::pair<double, double> question_mark_steps = {0.18, 0.96};  // per-mark for 2-3, flat for 4+
    int negation_window = 3;
    std::vector<double> distance_damping = {1.0, 0.95, 0.9};
    std::pair<double, double> contrast_weights = {0.5, 1.5};  // before / after "but"

    void validate() const {
        if (alpha <= 0.0) throw Error(errc::config_invalid, "alpha must be > 0");
        if (negation_window < 1) throw Error(errc::config_invalid, "negation_window must be >= 1");
        if (exclamation_cap < 0) throw Error(errc::config_invalid, "exclamation_cap must be >= 0");
        for (double d : distance_damping)
            if (d <= 0.0 || d > 1.0)
                throw Error(errc::config_invalid, "distance damping factors must be in (0, 1]");
        if (static_cast<int>(distance_damping.size()) < negation_window)
            throw Error(errc::config_invalid, "distance_damping must cover the negation window");
    }
};

struct SentimentResult {
    double compound = 0.0;              // [-1, 1], 4-decimal precision
    double pos_share = 0.0;
    double neu_share = 0.0;
    double neg_share = 0.0;
    Polarity polarity = Polarity::Neutral;
    bool shares_defined = false;        // false when the text produced no tokens
    bool no_signal = true;              // true when no token matched the lexicon
};

/// Hutto normalization: x / sqrt(x^2 + alpha), clamped to [-1, 1].
inline double normalize(double x, double alpha = 15.0) {
    const double n = x / std::sqrt(x * x + alpha);
    return std::clamp(n, -1.0, 1.0);
}

/// Strict thresholds: both boundary values map to Neutral.
inline Polarity classify_polarity(double compound) {
    if (compound < -1.0 || compound > 1.0)
        throw Error(errc::compound_out_of_range, std::to_string(compound));
    if (compound > 0.1) return Polarity::Positive;
    if (compound < -0.1) return Polarity::Negative;
    return Polarity::Neutral;
}

namespace senti_detail {

inline const std::unordered_set<std::string>& negate_words() {
    static const std::unordered_set<std::string> kNegate = {
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
        "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite"};
    return kNegate;
}

// degree modifiers; value sign selects booster vs dampener
inline const std::unordered_map<std::string, double>& booster_table(double incr, double decr) {
    static const std::unordered_map<std::string, double> kBase = [] {
        std::unordered_map<std::string, double> m;
        for (const char* w : {"absolutely", "amazingly", "awfully", "completely", "considerable",
                              "considerably", "decidedly", "deeply", "effing", "enormous", "enormously",
                              "entirely", "especially", "exceptional", "exceptionally", "extreme",
                              "extremely", "fabulously", "flipping", "flippin", "frackin", "fracking",
                              "fricking", "frickin", "frigging", "friggin", "fully", "fuckin", "fucking",
                              "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
                              "incredibly", "intensely", "major", "majorly", "more", "most", "particularly",
                              "purely", "quite", "really", "remarkably", "so", "substantially",
                              "thoroughly", "total", "totally", "tremendous", "tremendously", "uber",
                              "unbelievably", "unusually", "utter", "utterly", "very"})
            m.emplace(w, 1.0);
        for (const char* w : {"almost", "barely", "hardly", "just enough", "kind of", "kinda",
                              "kindof", "kind-of", "less", "little", "marginal", "marginally",
                              "occasional", "occasionally", "partly", "scarce", "scarcely", "slight",
                              "slightly", "somewhat", "sort of", "sorta", "sortof", "sort-of"})
            m.emplace(w, -1.0);
        return m;
    }();

    // signs are fixed; magnitudes come from the active config
    thread_local std::unordered_map<std::string, double> scaled;
    thread_local double cached_incr = 0.0, cached_decr = 0.0;
    if (scaled.empty() || cached_incr != incr || cached_decr != decr) {
        scaled.clear();
        for (const auto& [word, sign] : kBase)
            scaled.emplace(word, sign > 0 ? incr : decr);
        cached_incr = incr;
        cached_decr = decr;
    }
    return scaled;
}

inline const std::unordered_map<std::string, double>& special_idioms() {
    static const std::unordered_map<std::string, double> kIdioms = {
        {"the shit", 3.0},  {"the bomb", 3.0},      {"bad ass", 1.5},
        {"badass", 1.5},    {"bus stop", 0.0},      {"yeah right", -2.0},
        {"kiss of death", -1.5}, {"to die for", 3.0}, {"beating heart", 3.1},
        {"broken heart", -2.9}};
    return kIdioms;
}

constexpr double kNeverIntensifier = 1.25;
constexpr const char* kPunctuation = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

inline bool is_ascii_punct(char c) {
    for (const char* p = kPunctuation; *p; ++p)
        if (*p == c) return true;
    return false;
}

// python str.isupper: at least one letter, and every letter uppercase
inline bool is_upper_token(std::string_view word) {
    bool has_alpha = false;
    for (char c : word) {
        if (c >= 'a' && c <= 'z') return false;
        if (c >= 'A' && c <= 'Z') has_alpha = true;
    }
    return has_alpha;
}

inline bool allcap_differential(const std::vector<std::string>& words) {
    std::size_t allcap = 0;
    for (const auto& w : words)
        if (is_upper_token(w)) ++allcap;
    const std::size_t diff = words.size() - allcap;
    return diff > 0 && diff < words.size();
}

inline bool is_negation(const std::string& folded_word) {
    if (negate_words().count(folded_word)) return true;
    return folded_word.find("n't") != std::string::npos;
}

inline double scalar_inc_dec(const std::string& word, double valence, bool is_cap_diff,
                             const RuleConfig& cfg) {
    const auto& boosters = booster_table(cfg.booster_increment, -cfg.booster_increment);
    auto it = boosters.find(to_lower(word));
    if (it == boosters.end()) return 0.0;
    double scalar = it->second;
    if (valence < 0) scalar = -scalar;
    if (is_upper_token(word) && is_cap_diff)
        scalar += (valence > 0) ? cfg.caps_scalar : -cfg.caps_scalar;
    return scalar;
}

inline std::size_t count_char(std::string_view text, char c) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), c));
}

inline double amplify_exclamation(std::string_view text, const RuleConfig& cfg) {
    auto n = count_char(text, '!');
    if (n > static_cast<std::size_t>(cfg.exclamation_cap))
        n = static_cast<std::size_t>(cfg.exclamation_cap);
    return static_cast<double>(n) * cfg.exclamation_step;
}

inline double amplify_question(std::string_view text, const RuleConfig& cfg) {
    auto n = count_char(text, '?');
    if (n <= 1) return 0.0;
    if (n <= 3) return static_cast<double>(n) * cfg.question_mark_steps.first;
    return cfg.question_mark_steps.second;
}

} // namespace senti_detail

/// Whitespace-delimited tokens with leading/trailing punctuation stripped,
/// except that a token whose stripped form has two or fewer characters keeps
/// its original spelling (emoticons like ":)" survive). Casing preserved.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens = split_whitespace(text);
    for (std::string& tok : tokens) {
        std::size_t b = 0, e = tok.size();
        while (b < e && senti_detail::is_ascii_punct(tok[b])) ++b;
        while (e > b && senti_detail::is_ascii_punct(tok[e - 1])) --e;
        std::string stripped = tok.substr(b, e - b);
        if (utf8_length(stripped) > 2) tok = std::move(stripped);
    }
    return tokens;
}

/// Valence contributed by tokens[index] before the contrast pass: lexicon
/// value adjusted for all-caps emphasis, preceding boosters with distance
/// damping, negation within the window, and idiom overrides. Boosters and
/// "kind of" contribute zero themselves; so does anything not in the lexicon.
inline double token_valence(const std::vector<std::string>& tokens, std::size_t index,
                            const Lexicon& lexicon, const RuleConfig& cfg = {}) {
    using namespace senti_detail;
    if (index >= tokens.size())
        throw Error(errc::index_out_of_range,
                    "index " + std::to_string(index) + " of " + std::to_string(tokens.size()));

    std::vector<std::string> lower;
    lower.reserve(tokens.size());
    for (const auto& t : tokens) lower.push_back(to_lower(t));

    const std::string& item = tokens[index];
    const std::string& item_lower = lower[index];

    const auto& boosters = booster_table(cfg.booster_increment, -cfg.booster_increment);
    if (boosters.count(item_lower)) return 0.0;
    if (index + 1 < tokens.size() && item_lower == "kind" && lower[index + 1] == "of") return 0.0;

    auto base = lookup(lexicon, item_lower);
    if (!base) return 0.0;
    double valence = *base;

    const bool is_cap_diff = allcap_differential(tokens);
    const std::size_t i = index;

    // "no" directly before a lexicon word acts as a negator, not a word
    if (item_lower == "no" && i + 1 < tokens.size() && lexicon.contains(lower[i + 1]))
        valence = 0.0;
    if ((i > 0 && lower[i - 1] == "no") ||
        (i > 1 && lower[i - 2] == "no") ||
        (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor")))
        valence = *base * cfg.negation_scalar;

    if (is_upper_token(item) && is_cap_diff)
        valence += (valence > 0) ? cfg.caps_scalar : -cfg.caps_scalar;

    auto negation_check = [&](double v, int start_i) -> double {
        if (start_i == 0) {
            if (is_negation(lower[i - 1])) v *= cfg.negation_scalar;
        } else if (start_i == 1) {
            if (lower[i - 2] == "never" && (lower[i - 1] == "so" || lower[i - 1] == "this"))
                v *= kNeverIntensifier;
            else if (lower[i - 2] == "without" && lower[i - 1] == "doubt")
                ;  // neutralized, not negated
            else if (is_negation(lower[i - 2]))
                v *= cfg.negation_scalar;
        } else if (start_i == 2) {
            if ((lower[i - 3] == "never" &&
                 (lower[i - 2] == "so" || lower[i - 2] == "this")) ||
                (lower[i - 1] == "so" || lower[i - 1] == "this"))
                v *= kNeverIntensifier;
            else if (lower[i - 3] == "without" &&
                     (lower[i - 2] == "doubt" || lower[i - 1] == "doubt"))
                ;
            else if (is_negation(lower[i - 3]))
                v *= cfg.negation_scalar;
        } else {
            if (is_negation(lower[i - static_cast<std::size_t>(start_i) - 1]))
                v *= cfg.negation_scalar;
        }
        return v;
    };

    auto idioms_check = [&](double v) -> double {
        const auto& idioms = special_idioms();
        auto join2 = [&](std::size_t a, std::size_t b) { return lower[a] + " " + lower[b]; };
        auto join3 = [&](std::size_t a, std::size_t b, std::size_t c) {
            return lower[a] + " " + lower[b] + " " + lower[c];
        };
        // backward windows ending at / before the current token
        std::vector<std::string> sequences;
        sequences.push_back(join2(i - 1, i));
        sequences.push_back(join3(i - 2, i - 1, i));
        sequences.push_back(join2(i - 2, i - 1));
        sequences.push_back(join3(i - 3, i - 2, i - 1));
        sequences.push_back(join2(i - 3, i - 2));
        for (const auto& seq : sequences) {
            auto it = idioms.find(seq);
            if (it != idioms.end()) {
                v = it->second;
                break;
            }
        }
        if (tokens.size() - 1 > i) {
            auto it = idioms.find(join2(i, i + 1));
            if (it != idioms.end()) v = it->second;
        }
        if (tokens.size() - 1 > i + 1) {
            auto it = idioms.find(join3(i, i + 1, i + 2));
            if (it != idioms.end()) v = it->second;
        }
        // multi-word boosters directly behind the token ("sort of", ...)
        for (const auto& ngram : {join3(i - 3, i - 2, i - 1), join2(i - 3, i - 2), join2(i - 2, i - 1)}) {
            auto it = boosters.find(ngram);
            if (it != boosters.end()) v += it->second;
        }
        return v;
    };

    for (int start_i = 0; start_i < cfg.negation_window; ++start_i) {
        const auto back = static_cast<std::size_t>(start_i) + 1;
        if (i <= static_cast<std::size_t>(start_i)) continue;
        if (lexicon.contains(lower[i - back])) continue;
        double s = scalar_inc_dec(tokens[i - back], valence, is_cap_diff, cfg);
        if (s != 0.0) s *= cfg.distance_damping[static_cast<std::size_t>(start_i)];
        valence += s;
        valence = negation_check(valence, start_i);
        if (start_i == 2) valence = idioms_check(valence);
    }

    // "least good" negates, "at least" / "very least" do not
    if (i > 1 && !lexicon.contains(lower[i - 1]) && lower[i - 1] == "least") {
        if (lower[i - 2] != "at" && lower[i - 2] != "very") valence *= cfg.negation_scalar;
    } else if (i > 0 && !lexicon.contains(lower[i - 1]) && lower[i - 1] == "least") {
        valence *= cfg.negation_scalar;
    }

    return valence;
}

/// Full scorer: per-token valences, contrast reweighting around "but",
/// punctuation emphasis on the summed signal, Hutto normalization, and the
/// strict +/-0.1 polarity thresholds.
inline SentimentResult analyze(std::string_view text, const Lexicon& lexicon,
                               const RuleConfig& cfg = {}) {
    using namespace senti_detail;

    SentimentResult result;
    const std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) return result;

    std::vector<double> sentiments;
    sentiments.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i)
        sentiments.push_back(token_valence(tokens, i, lexicon, cfg));

    result.no_signal = std::all_of(sentiments.begin(), sentiments.end(),
                                   [](double v) { return v == 0.0; });

    // contrast pass; mirrors the reference scanner, which rescales the first
    // position holding the visited value when values repeat
    {
        std::vector<std::string> lower;
        lower.reserve(tokens.size());
        for (const auto& t : tokens) lower.push_back(to_lower(t));
        auto but = std::find(lower.begin(), lower.end(), "but");
        if (but != lower.end()) {
            const auto bi = static_cast<std::size_t>(but - lower.begin());
            for (std::size_t k = 0; k < sentiments.size(); ++k) {
                const double v = sentiments[k];
                const auto si = static_cast<std::size_t>(
                    std::find(sentiments.begin(), sentiments.end(), v) - sentiments.begin());
                if (si < bi)
                    sentiments[si] = v * cfg.contrast_weights.first;
                else if (si > bi)
                    sentiments[si] = v * cfg.contrast_weights.second;
            }
        }
    }

    double sum = 0.0;
    for (double v : sentiments) sum += v;

    const double punct_emph = amplify_exclamation(text, cfg) + amplify_question(text, cfg);
    if (sum > 0)
        sum += punct_emph;
    else if (sum < 0)
        sum -= punct_emph;

    const double compound = normalize(sum, cfg.alpha);
    result.compound = std::round(compound * 10000.0) / 10000.0;

    double pos_sum = 0.0, neg_sum = 0.0;
    int neu_count = 0;
    for (double v : sentiments) {
        if (v > 0) pos_sum += v + 1.0;  // the +/-1 offsets weigh neutral tokens
        if (v < 0) neg_sum += v - 1.0;
        if (v == 0) ++neu_count;
    }
    if (pos_sum > std::fabs(neg_sum))
        pos_sum += punct_emph;
    else if (pos_sum < std::fabs(neg_sum))
        neg_sum -= punct_emph;

    const double total = pos_sum + std::fabs(neg_sum) + neu_count;
    result.pos_share = std::fabs(pos_sum / total);
    result.neg_share = std::fabs(neg_sum / total);
    result.neu_share = std::fabs(static_cast<double>(neu_count) / total);
    result.shares_defined = true;
    result.polarity = classify_polarity(result.compound);
    return result;
}

} // namespace ridepulse
