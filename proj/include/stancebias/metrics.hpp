#pragma once

#include <span>
#include <string>
#include <vector>

#include "stancebias/stance.hpp"

namespace stancebias {

enum class MetricKind { WeightedF1, NeutralRate, EO, DI, PP, MeanAbsEO };

std::string to_string(MetricKind m);

// How Neutral predictions enter the fairness metrics. NotPositive is the
// default: the rates are probabilities of predicting positive, and a
// neutral answer did not predict positive. Drop removes neutral rows first.
enum class NeutralFairnessMode { NotPositive, Drop };

struct EvalRow {
    Stance gold;
    PredictedStance pred;
    int group;  // 0-based index into the evaluation's group list
};

struct EvalView {
    std::vector<EvalRow> rows;
    PositiveLabel positive = PositiveLabel::Favor;
    int group_count = 2;
};

struct MetricValue {
    MetricKind metric;
    std::string group;  // group name, or "overall"
    PositiveLabel direction = PositiveLabel::Favor;
    double value = 0.0;
};

// Support-weighted mean of the per-class F1 for Favor and Against, computed
// after dropping rows with a Neutral prediction. Throws UndefinedMetricError
// when every prediction is Neutral.
MetricValue weighted_f1(const EvalView& view);

// Percentage (0..100) of Neutral predictions. Throws InputError on an empty
// view.
MetricValue neutral_rate(const EvalView& view);

// P(pred positive | gold positive, group a) - same for the rest. Throws
// UndefinedMetricError naming the side that has no gold-positive record.
MetricValue equal_opportunity(const EvalView& view, int group_a,
                              NeutralFairnessMode mode = NeutralFairnessMode::NotPositive);

// P(pred positive | group a) - P(pred positive | rest).
MetricValue demographic_parity(const EvalView& view, int group_a,
                               NeutralFairnessMode mode = NeutralFairnessMode::NotPositive);

// P(gold positive | pred positive, group a) - same for the rest. Undefined
// when either side predicted no positives; reported as missing, never 0.
MetricValue predictive_parity(const EvalView& view, int group_a,
                              NeutralFairnessMode mode = NeutralFairnessMode::NotPositive);

// Arithmetic mean of |EO| over per-group, per-direction values.
MetricValue mean_abs_eo(std::span<const MetricValue> eo_values);

} // namespace stancebias
