#include "stancebias/metrics.hpp"

#include <cmath>

#include "stancebias/errors.hpp"

namespace stancebias {

std::string to_string(MetricKind m) {
    switch (m) {
        case MetricKind::WeightedF1: return "weighted_f1";
        case MetricKind::NeutralRate: return "neutral_rate";
        case MetricKind::EO: return "EO";
        case MetricKind::DI: return "DI";
        case MetricKind::PP: return "PP";
        case MetricKind::MeanAbsEO: return "mean_abs_EO";
    }
    return "EO";
}

MetricValue weighted_f1(const EvalView& view) {
    // Confusion counts on the non-neutral subset, per gold class.
    long tp_f = 0, fp_f = 0, fn_f = 0;
    long tp_a = 0, fp_a = 0, fn_a = 0;
    long support_f = 0, support_a = 0;
    for (const EvalRow& r : view.rows) {
        if (r.pred == PredictedStance::Neutral) continue;
        bool gold_favor = r.gold == Stance::Favor;
        bool pred_favor = r.pred == PredictedStance::Favor;
        (gold_favor ? support_f : support_a)++;
        if (gold_favor && pred_favor) ++tp_f;
        if (!gold_favor && pred_favor) ++fp_f;
        if (gold_favor && !pred_favor) ++fn_f;
        if (!gold_favor && !pred_favor) ++tp_a;
        if (gold_favor && !pred_favor) ++fp_a;
        if (!gold_favor && pred_favor) ++fn_a;
    }
    long total = support_f + support_a;
    if (total == 0) {
        throw UndefinedMetricError("weighted F1 undefined: every prediction is Neutral");
    }
    auto f1 = [](long tp, long fp, long fn) {
        double p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        double r = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    };
    double value = (static_cast<double>(support_f) * f1(tp_f, fp_f, fn_f) +
                    static_cast<double>(support_a) * f1(tp_a, fp_a, fn_a)) /
                   static_cast<double>(total);
    return {MetricKind::WeightedF1, "overall", view.positive, value};
}

MetricValue neutral_rate(const EvalView& view) {
    if (view.rows.empty()) throw InputError("neutral rate undefined on an empty view");
    long neutral = 0;
    for (const EvalRow& r : view.rows) {
        if (r.pred == PredictedStance::Neutral) ++neutral;
    }
    double value = 100.0 * static_cast<double>(neutral) / static_cast<double>(view.rows.size());
    return {MetricKind::NeutralRate, "overall", view.positive, value};
}

namespace {

struct GroupCounts {
    long gold_pos = 0;        // y = 1
    long gold_pos_hit = 0;    // y = 1 and pred = 1
    long total = 0;
    long pred_pos = 0;        // pred = 1
    long pred_pos_true = 0;   // pred = 1 and y = 1
};

// Counts for group a and the rest, honoring the neutral mode.
std::pair<GroupCounts, GroupCounts> tally(const EvalView& view, int group_a,
                                          NeutralFairnessMode mode) {
    GroupCounts a, rest;
    for (const EvalRow& r : view.rows) {
        if (mode == NeutralFairnessMode::Drop && r.pred == PredictedStance::Neutral) continue;
        GroupCounts& g = (r.group == group_a) ? a : rest;
        bool y = is_positive(r.gold, view.positive);
        bool yhat = is_positive(r.pred, view.positive);  // Neutral is never positive
        g.total++;
        if (y) {
            g.gold_pos++;
            if (yhat) g.gold_pos_hit++;
        }
        if (yhat) {
            g.pred_pos++;
            if (y) g.pred_pos_true++;
        }
    }
    return {a, rest};
}

} // namespace

MetricValue equal_opportunity(const EvalView& view, int group_a, NeutralFairnessMode mode) {
    auto [a, rest] = tally(view, group_a, mode);
    if (a.gold_pos == 0) {
        throw UndefinedMetricError("EO undefined: group " + std::to_string(group_a) +
                                   " has no gold-positive record");
    }
    if (rest.gold_pos == 0) {
        throw UndefinedMetricError("EO undefined: complement of group " + std::to_string(group_a) +
                                   " has no gold-positive record");
    }
    double tpr_a = static_cast<double>(a.gold_pos_hit) / static_cast<double>(a.gold_pos);
    double tpr_rest = static_cast<double>(rest.gold_pos_hit) / static_cast<double>(rest.gold_pos);
    return {MetricKind::EO, std::to_string(group_a), view.positive, tpr_a - tpr_rest};
}

MetricValue demographic_parity(const EvalView& view, int group_a, NeutralFairnessMode mode) {
    auto [a, rest] = tally(view, group_a, mode);
    if (a.total == 0) {
        throw UndefinedMetricError("DI undefined: group " + std::to_string(group_a) + " is empty");
    }
    if (rest.total == 0) {
        throw UndefinedMetricError("DI undefined: complement of group " + std::to_string(group_a) +
                                   " is empty");
    }
    double rate_a = static_cast<double>(a.pred_pos) / static_cast<double>(a.total);
    double rate_rest = static_cast<double>(rest.pred_pos) / static_cast<double>(rest.total);
    return {MetricKind::DI, std::to_string(group_a), view.positive, rate_a - rate_rest};
}

MetricValue predictive_parity(const EvalView& view, int group_a, NeutralFairnessMode mode) {
    auto [a, rest] = tally(view, group_a, mode);
    if (a.pred_pos == 0) {
        throw UndefinedMetricError("PP undefined: group " + std::to_string(group_a) +
                                   " has no predicted-positive record");
    }
    if (rest.pred_pos == 0) {
        throw UndefinedMetricError("PP undefined: complement of group " + std::to_string(group_a) +
                                   " has no predicted-positive record");
    }
    double prec_a = static_cast<double>(a.pred_pos_true) / static_cast<double>(a.pred_pos);
    double prec_rest = static_cast<double>(rest.pred_pos_true) / static_cast<double>(rest.pred_pos);
    return {MetricKind::PP, std::to_string(group_a), view.positive, prec_a - prec_rest};
}

MetricValue mean_abs_eo(std::span<const MetricValue> eo_values) {
    if (eo_values.empty()) throw InputError("mean |EO| undefined on an empty collection");
    double sum = 0.0;
    for (const MetricValue& v : eo_values) sum += std::abs(v.value);
    return {MetricKind::MeanAbsEO, "overall", PositiveLabel::Favor,
            sum / static_cast<double>(eo_values.size())};
}

} // namespace stancebias
