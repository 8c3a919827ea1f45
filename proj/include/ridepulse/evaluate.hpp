#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "ridepulse/errors.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

/// One-vs-rest counts for a single category.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

/// Ratio metric with an explicit degenerate-denominator flag; flagged
/// metrics carry value 0 so batch reports never abort.
struct MetricValue {
    double value = 0.0;
    bool defined = true;
};

struct CategoryMetrics {
    ConfusionCounts counts;
    MetricValue precision;
    MetricValue recall;
    double f1 = 0.0;
};

struct AverageMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::map<TopicCategory, CategoryMetrics> per_category;
    AverageMetrics macro;  // unweighted mean over the four categories
    AverageMetrics micro;  // from summed counts
    std::size_t n_evaluated = 0;
};

using LabelSet = std::vector<std::pair<std::string, TopicCategory>>;

/// One-vs-rest confusion counts per category. Predictions and truth must
/// cover the same post ids.
inline std::map<TopicCategory, ConfusionCounts> confusion(const LabelSet& predictions,
                                                          const LabelSet& ground_truth) {
    if (predictions.size() != ground_truth.size())
        throw Error(errc::id_set_mismatch,
                    std::to_string(predictions.size()) + " predictions vs " +
                        std::to_string(ground_truth.size()) + " truth labels");
    std::unordered_map<std::string, TopicCategory> truth;
    truth.reserve(ground_truth.size());
    for (const auto& [id, cat] : ground_truth)
        if (!truth.emplace(id, cat).second)
            throw Error(errc::id_set_mismatch, "duplicate truth id '" + id + "'");

    std::map<TopicCategory, ConfusionCounts> out;
    for (TopicCategory c : kAllCategories) out[c] = {};

    std::unordered_set<std::string> seen;
    seen.reserve(predictions.size());
    for (const auto& [id, predicted] : predictions) {
        auto it = truth.find(id);
        if (it == truth.end())
            throw Error(errc::id_set_mismatch, "prediction id '" + id + "' missing from truth");
        if (!seen.insert(id).second)
            throw Error(errc::id_set_mismatch, "duplicate prediction id '" + id + "'");
        const TopicCategory actual = it->second;
        for (TopicCategory c : kAllCategories) {
            ConfusionCounts& cc = out[c];
            const bool pred_is_c = predicted == c;
            const bool true_is_c = actual == c;
            if (pred_is_c && true_is_c) ++cc.tp;
            else if (pred_is_c && !true_is_c) ++cc.fp;
            else if (!pred_is_c && true_is_c) ++cc.fn;
            else ++cc.tn;
        }
    }
    return out;
}

inline MetricValue precision(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) return {0.0, false};
    return {static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp), true};
}

inline MetricValue recall(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) return {0.0, false};
    return {static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn), true};
}

/// Harmonic mean; 0 when both inputs are 0.
inline double f1(double p, double r) {
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

inline EvalReport evaluate(const LabelSet& predictions, const LabelSet& ground_truth) {
    EvalReport report;
    auto counts = confusion(predictions, ground_truth);
    report.n_evaluated = predictions.size();

    ConfusionCounts micro_sum;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    for (TopicCategory c : kAllCategories) {
        CategoryMetrics m;
        m.counts = counts[c];
        m.precision = precision(m.counts);
        m.recall = recall(m.counts);
        m.f1 = f1(m.precision.value, m.recall.value);
        macro_p += m.precision.value;
        macro_r += m.recall.value;
        macro_f1 += m.f1;
        micro_sum.tp += m.counts.tp;
        micro_sum.fp += m.counts.fp;
        micro_sum.fn += m.counts.fn;
        micro_sum.tn += m.counts.tn;
        report.per_category[c] = m;
    }
    report.macro.precision = macro_p / 4.0;
    report.macro.recall = macro_r / 4.0;
    report.macro.f1 = macro_f1 / 4.0;
    report.micro.precision = precision(micro_sum).value;
    report.micro.recall = recall(micro_sum).value;
    report.micro.f1 = f1(report.micro.precision, report.micro.recall);
    return report;
}

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["n_evaluated"] = r.n_evaluated;
    for (const auto& [cat, m] : r.per_category) {
        nlohmann::json c;
        c["tp"] = m.counts.tp;
        c["fp"] = m.counts.fp;
        c["fn"] = m.counts.fn;
        c["tn"] = m.counts.tn;
        c["precision"] = m.precision.value;
        c["precision_defined"] = m.precision.defined;
        c["recall"] = m.recall.value;
        c["recall_defined"] = m.recall.defined;
        c["f1"] = m.f1;
        j["per_category"][category_name(cat)] = c;
    }
    j["macro"] = {{"precision", r.macro.precision}, {"recall", r.macro.recall}, {"f1", r.macro.f1}};
    j["micro"] = {{"precision", r.micro.precision}, {"recall", r.micro.recall}, {"f1", r.micro.f1}};
    return j;
}

} // namespace ridepulse
