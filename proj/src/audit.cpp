#include "stancebias/audit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stancebias/errors.hpp"
#include "stancebias/rng.hpp"

namespace stancebias {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Strata as corpus indices, ordered (group 0 favor, group 0 against,
// group 1 favor, ...). Built once per audit.
struct SamplingPool {
    std::vector<std::vector<std::size_t>> strata;
    int group_count = 0;

    std::size_t stratum_index(int group, Stance stance) const {
        return static_cast<std::size_t>(group) * 2 + (stance == Stance::Favor ? 0 : 1);
    }
};

SamplingPool build_pool(const Corpus& corpus, const AuditConfig& config) {
    if (config.groups.size() < 2) {
        throw ConfigError("audit needs at least two groups");
    }
    SamplingPool pool;
    pool.group_count = static_cast<int>(config.groups.size());
    pool.strata.assign(config.groups.size() * 2, {});
    const auto& records = corpus.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const StanceRecord& r = records[i];
        if (!config.target.empty() && r.target != config.target) continue;
        std::string value = attribute_value(r, config.attribute);
        if (value.empty()) continue;
        auto it = std::find(config.groups.begin(), config.groups.end(), value);
        if (it == config.groups.end()) continue;
        int g = static_cast<int>(it - config.groups.begin());
        pool.strata[pool.stratum_index(g, r.gold_stance)].push_back(i);
    }
    return pool;
}

int resolve_size(const SamplingPool& pool, const AuditConfig& config) {
    std::size_t min_stratum = SIZE_MAX;
    std::size_t limiting = 0;
    for (std::size_t s = 0; s < pool.strata.size(); ++s) {
        if (pool.strata[s].size() < min_stratum) {
            min_stratum = pool.strata[s].size();
            limiting = s;
        }
    }
    auto stratum_name = [&](std::size_t s) {
        return config.groups[s / 2] + "/" + (s % 2 == 0 ? "Favor" : "Against");
    };
    if (config.per_group_size == 0) {
        if (min_stratum == 0) {
            throw SamplingError("stratum " + stratum_name(limiting) + " is empty");
        }
        return static_cast<int>(2 * min_stratum);
    }
    if (config.per_group_size < 2 || config.per_group_size % 2 != 0) {
        throw SamplingError("per_group_size must be a positive even number (half Favor, half Against)");
    }
    auto half = static_cast<std::size_t>(config.per_group_size) / 2;
    if (min_stratum < half) {
        throw SamplingError("stratum " + stratum_name(limiting) + " has " +
                            std::to_string(min_stratum) + " records, need " + std::to_string(half));
    }
    return config.per_group_size;
}

std::vector<std::size_t> draw_indices(const SamplingPool& pool, const AuditConfig& config,
                                      int per_group_size, int sample_index) {
    Rng rng(stream_key(config.seed, static_cast<std::uint64_t>(sample_index)));
    auto half = static_cast<std::size_t>(per_group_size) / 2;
    std::vector<std::size_t> out;
    out.reserve(pool.strata.size() * half);
    for (const auto& stratum : pool.strata) {
        for (std::size_t j : rng.sample_indices(stratum.size(), half)) {
            out.push_back(stratum[j]);
        }
    }
    return out;
}

EvalView view_from_indices(const Corpus& corpus,
                           const std::map<std::string, StancePrediction>& predictions,
                           const AuditConfig& config, const SamplingPool& pool,
                           const std::vector<std::size_t>& indices) {
    EvalView view;
    view.group_count = pool.group_count;
    view.rows.reserve(indices.size());
    const auto& records = corpus.records();
    for (std::size_t i : indices) {
        const StanceRecord& r = records[i];
        auto it = predictions.find(r.id);
        if (it == predictions.end()) {
            throw SamplingError("no prediction for record " + r.id);
        }
        std::string value = attribute_value(r, config.attribute);
        auto git = std::find(config.groups.begin(), config.groups.end(), value);
        view.rows.push_back(
            {r.gold_stance, it->second.stance, static_cast<int>(git - config.groups.begin())});
    }
    return view;
}

struct RunningStats {
    std::vector<double> values;
    int missing = 0;

    void add(double v) { values.push_back(v); }

    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return values.empty() ? 0.0 : s / static_cast<double>(values.size());
    }

    double population_sd() const {
        if (values.size() < 2) return 0.0;
        double m = mean();
        double s = 0.0;
        for (double v : values) s += (v - m) * (v - m);
        return std::sqrt(s / static_cast<double>(values.size()));
    }
};

} // namespace

std::optional<AuditAttribute> audit_attribute_from_string(std::string_view name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "dialect") return AuditAttribute::Dialect;
    if (n == "readability" || n == "complexity") return AuditAttribute::Readability;
    return std::nullopt;
}

std::string to_string(AuditAttribute attribute) {
    return attribute == AuditAttribute::Dialect ? "dialect" : "readability";
}

std::string attribute_value(const StanceRecord& record, AuditAttribute attribute) {
    if (!record.annotation.has_value()) return {};
    if (attribute == AuditAttribute::Readability) {
        if (!record.annotation->readability.has_value()) return {};
        return to_string(record.annotation->readability->cls);
    }
    if (!record.annotation->dialect.has_value()) return {};
    DialectLabel label = record.annotation->dialect->label;
    if (label == DialectLabel::Unknown) return {};  // excluded from dialect audits
    return to_string(label);
}

int resolve_per_group_size(const Corpus& corpus, const AuditConfig& config) {
    return resolve_size(build_pool(corpus, config), config);
}

std::vector<std::string> sample_record_ids(const Corpus& corpus, const AuditConfig& config,
                                           int sample_index) {
    SamplingPool pool = build_pool(corpus, config);
    int size = resolve_size(pool, config);
    std::vector<std::string> ids;
    for (std::size_t i : draw_indices(pool, config, size, sample_index)) {
        ids.push_back(corpus.records()[i].id);
    }
    return ids;
}

EvalView draw_balanced_sample(const Corpus& corpus,
                              const std::map<std::string, StancePrediction>& predictions,
                              const AuditConfig& config, int sample_index) {
    SamplingPool pool = build_pool(corpus, config);
    int size = resolve_size(pool, config);
    return view_from_indices(corpus, predictions, config, pool,
                             draw_indices(pool, config, size, sample_index));
}

AuditResult run_audit(const Corpus& corpus,
                      const std::map<std::string, StancePrediction>& predictions,
                      const AuditConfig& config) {
    if (config.n_samples < 1) throw ConfigError("n_samples must be at least 1");
    if (predictions.empty()) throw SamplingError("no predictions supplied");
    SamplingPool pool = build_pool(corpus, config);
    int per_group = resolve_size(pool, config);

    AuditResult result;
    result.model_id = predictions.begin()->second.model_id;
    result.dataset = corpus.empty() ? "" : corpus.records().front().dataset_tag;
    result.target = config.target.empty() ? "overall" : config.target;
    result.attribute = to_string(config.attribute);
    result.groups = config.groups;
    result.n_samples = config.n_samples;
    result.per_group_size = per_group;
    result.seed = config.seed;

    const std::size_t n_groups = config.groups.size();
    const std::size_t n_dirs = config.directions.size();
    const MetricKind fairness[] = {MetricKind::EO, MetricKind::DI, MetricKind::PP};
    // stats[direction][group][metric]
    std::vector<RunningStats> stats(n_dirs * n_groups * 3);
    auto stat_at = [&](std::size_t d, std::size_t g, std::size_t m) -> RunningStats& {
        return stats[(d * n_groups + g) * 3 + m];
    };

    for (int s = 0; s < config.n_samples; ++s) {
        std::vector<std::size_t> indices = draw_indices(pool, config, per_group, s);
        EvalView view = view_from_indices(corpus, predictions, config, pool, indices);
        for (std::size_t d = 0; d < n_dirs; ++d) {
            view.positive = config.directions[d];
            for (std::size_t g = 0; g < n_groups; ++g) {
                for (std::size_t m = 0; m < 3; ++m) {
                    try {
                        MetricValue v;
                        switch (fairness[m]) {
                            case MetricKind::EO:
                                v = equal_opportunity(view, static_cast<int>(g), config.neutral_mode);
                                break;
                            case MetricKind::DI:
                                v = demographic_parity(view, static_cast<int>(g), config.neutral_mode);
                                break;
                            default:
                                v = predictive_parity(view, static_cast<int>(g), config.neutral_mode);
                                break;
                        }
                        stat_at(d, g, m).add(v.value);
                    } catch (const UndefinedMetricError&) {
                        stat_at(d, g, m).missing++;  // missing, never zero
                    }
                }
            }
        }
    }

    std::vector<MetricValue> eo_cells;
    for (std::size_t d = 0; d < n_dirs; ++d) {
        for (std::size_t g = 0; g < n_groups; ++g) {
            for (std::size_t m = 0; m < 3; ++m) {
                const RunningStats& st = stat_at(d, g, m);
                AuditCell cell;
                cell.metric = fairness[m];
                cell.group = config.groups[g];
                cell.direction = config.directions[d];
                cell.n_defined = static_cast<int>(st.values.size());
                cell.n_missing = st.missing;
                cell.mean = st.mean();
                cell.sd = st.population_sd();
                cell.degenerate = st.missing * 2 > config.n_samples;
                if (cell.metric == MetricKind::EO && cell.n_defined > 0) {
                    eo_cells.push_back({MetricKind::EO, cell.group, cell.direction, cell.mean});
                }
                result.cells.push_back(std::move(cell));
            }
        }
    }

    // Whole-pool performance numbers (not resampled).
    std::vector<std::size_t> all;
    for (const auto& stratum : pool.strata) all.insert(all.end(), stratum.begin(), stratum.end());
    std::sort(all.begin(), all.end());
    result.pool_size = static_cast<int>(all.size());
    EvalView full = view_from_indices(corpus, predictions, config, pool, all);
    result.overall.neutral_rate = neutral_rate(full).value;
    try {
        result.overall.weighted_f1 = weighted_f1(full).value;
    } catch (const UndefinedMetricError&) {
        result.overall.weighted_f1 = std::nullopt;
    }
    if (!eo_cells.empty()) {
        result.overall.mean_abs_eo = mean_abs_eo(eo_cells).value;
    }
    return result;
}

ordered_json audit_result_to_json(const AuditResult& result) {
    ordered_json j;
    j["model"] = result.model_id;
    j["dataset"] = result.dataset;
    j["target"] = result.target;
    j["attribute"] = result.attribute;
    j["groups"] = result.groups;
    j["n_samples"] = result.n_samples;
    j["per_group_size"] = result.per_group_size;
    j["pool_size"] = result.pool_size;
    j["seed"] = result.seed;
    ordered_json cells = ordered_json::array();
    for (const AuditCell& c : result.cells) {
        ordered_json cj;
        cj["metric"] = to_string(c.metric);
        cj["group"] = c.group;
        cj["direction"] = to_string(c.direction);
        cj["mean"] = c.mean;
        cj["sd"] = c.sd;
        cj["n_defined"] = c.n_defined;
        cj["n_missing"] = c.n_missing;
        cj["degenerate"] = c.degenerate;
        cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    ordered_json overall;
    overall["weighted_f1"] =
        result.overall.weighted_f1.has_value() ? ordered_json(*result.overall.weighted_f1) : ordered_json(nullptr);
    overall["neutral_rate"] = result.overall.neutral_rate;
    overall["mean_abs_eo"] =
        result.overall.mean_abs_eo.has_value() ? ordered_json(*result.overall.mean_abs_eo) : ordered_json(nullptr);
    j["overall"] = std::move(overall);
    return j;
}

AuditResult audit_result_from_json(const json& j) {
    AuditResult r;
    try {
        r.model_id = j.at("model").get<std::string>();
        r.dataset = j.at("dataset").get<std::string>();
        r.target = j.at("target").get<std::string>();
        r.attribute = j.at("attribute").get<std::string>();
        r.groups = j.at("groups").get<std::vector<std::string>>();
        r.n_samples = j.at("n_samples").get<int>();
        r.per_group_size = j.at("per_group_size").get<int>();
        r.pool_size = j.value("pool_size", 0);
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const json& cj : j.at("cells")) {
            AuditCell c;
            std::string metric = cj.at("metric").get<std::string>();
            if (metric == "EO") c.metric = MetricKind::EO;
            else if (metric == "DI") c.metric = MetricKind::DI;
            else if (metric == "PP") c.metric = MetricKind::PP;
            else throw ConfigError("unknown metric in audit result: " + metric);
            c.group = cj.at("group").get<std::string>();
            auto dir = positive_label_from_string(cj.at("direction").get<std::string>());
            if (!dir.has_value()) throw ConfigError("unknown direction in audit result");
            c.direction = *dir;
            c.mean = cj.at("mean").get<double>();
            c.sd = cj.at("sd").get<double>();
            c.n_defined = cj.at("n_defined").get<int>();
            c.n_missing = cj.at("n_missing").get<int>();
            c.degenerate = cj.at("degenerate").get<bool>();
            r.cells.push_back(std::move(c));
        }
        const json& overall = j.at("overall");
        if (!overall.at("weighted_f1").is_null()) {
            r.overall.weighted_f1 = overall.at("weighted_f1").get<double>();
        }
        r.overall.neutral_rate = overall.at("neutral_rate").get<double>();
        if (!overall.at("mean_abs_eo").is_null()) {
            r.overall.mean_abs_eo = overall.at("mean_abs_eo").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed audit result: ") + e.what());
    }
    return r;
}

void write_audit_result(const AuditResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write audit result: " + path.string());
    out << audit_result_to_json(result).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

AuditResult load_audit_result(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open audit result: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return audit_result_from_json(j);
}

} // namespace stancebias
