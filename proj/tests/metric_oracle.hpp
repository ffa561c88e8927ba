#pragma once

// Brute-force counting oracle for the fairness metrics, kept independent of
// the library implementation: plain record loops, no shared tallying code.
// Returns std::nullopt where the metric is undefined.

#include <cmath>
#include <optional>
#include <vector>

#include "stancebias/metrics.hpp"

namespace oracle {

using stancebias::EvalRow;
using stancebias::EvalView;
using stancebias::PositiveLabel;
using stancebias::PredictedStance;
using stancebias::Stance;

inline bool gold_pos(const EvalRow& r, PositiveLabel d) {
    if (d == PositiveLabel::Favor) return r.gold == Stance::Favor;
    return r.gold == Stance::Against;
}

inline bool pred_pos(const EvalRow& r, PositiveLabel d) {
    if (d == PositiveLabel::Favor) return r.pred == PredictedStance::Favor;
    return r.pred == PredictedStance::Against;
}

inline std::optional<double> tpr(const EvalView& v, bool want_group_a, int a) {
    int pos = 0;
    int hit = 0;
    for (const EvalRow& r : v.rows) {
        if ((r.group == a) != want_group_a) continue;
        if (!gold_pos(r, v.positive)) continue;
        ++pos;
        if (pred_pos(r, v.positive)) ++hit;
    }
    if (pos == 0) return std::nullopt;
    return static_cast<double>(hit) / pos;
}

inline std::optional<double> eo(const EvalView& v, int a) {
    auto ta = tpr(v, true, a);
    auto tr = tpr(v, false, a);
    if (!ta || !tr) return std::nullopt;
    return *ta - *tr;
}

inline std::optional<double> rate(const EvalView& v, bool want_group_a, int a) {
    int n = 0;
    int pos = 0;
    for (const EvalRow& r : v.rows) {
        if ((r.group == a) != want_group_a) continue;
        ++n;
        if (pred_pos(r, v.positive)) ++pos;
    }
    if (n == 0) return std::nullopt;
    return static_cast<double>(pos) / n;
}

inline std::optional<double> di(const EvalView& v, int a) {
    auto ra = rate(v, true, a);
    auto rr = rate(v, false, a);
    if (!ra || !rr) return std::nullopt;
    return *ra - *rr;
}

inline std::optional<double> precision(const EvalView& v, bool want_group_a, int a) {
    int pos = 0;
    int correct = 0;
    for (const EvalRow& r : v.rows) {
        if ((r.group == a) != want_group_a) continue;
        if (!pred_pos(r, v.positive)) continue;
        ++pos;
        if (gold_pos(r, v.positive)) ++correct;
    }
    if (pos == 0) return std::nullopt;
    return static_cast<double>(correct) / pos;
}

inline std::optional<double> pp(const EvalView& v, int a) {
    auto pa = precision(v, true, a);
    auto pr = precision(v, false, a);
    if (!pa || !pr) return std::nullopt;
    return *pa - *pr;
}

// Weighted F1 over {Favor, Against} with Neutral rows removed, computed
// from scratch per class.
inline std::optional<double> weighted_f1(const EvalView& v) {
    std::vector<EvalRow> kept;
    for (const EvalRow& r : v.rows) {
        if (r.pred != PredictedStance::Neutral) kept.push_back(r);
    }
    if (kept.empty()) return std::nullopt;
    double weighted = 0.0;
    for (Stance cls : {Stance::Favor, Stance::Against}) {
        bool cls_favor = cls == Stance::Favor;
        int tp = 0, fp = 0, fn = 0, support = 0;
        for (const EvalRow& r : kept) {
            bool g = (r.gold == Stance::Favor) == cls_favor;
            bool p = (r.pred == PredictedStance::Favor) == cls_favor;
            if (g) ++support;
            if (g && p) ++tp;
            if (!g && p) ++fp;
            if (g && !p) ++fn;
        }
        double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        weighted += f1 * support;
    }
    return weighted / static_cast<double>(kept.size());
}

} // namespace oracle
