#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stancebias/corpus.hpp"
#include "stancebias/llm.hpp"
#include "stancebias/metrics.hpp"

namespace stancebias {

enum class AuditAttribute { Dialect, Readability };

std::optional<AuditAttribute> audit_attribute_from_string(std::string_view name);
std::string to_string(AuditAttribute attribute);

// The record's group value under an attribute ("AAE", "Easy", ...); empty
// when the record lacks the annotation or the dialect is Unknown.
std::string attribute_value(const StanceRecord& record, AuditAttribute attribute);

struct AuditConfig {
    AuditAttribute attribute = AuditAttribute::Dialect;
    std::vector<std::string> groups;     // ordered; subset of the attribute's values
    int n_samples = 1000;
    std::uint64_t seed = 0;
    int per_group_size = 0;              // 0 = auto: largest feasible even size
    std::vector<PositiveLabel> directions{PositiveLabel::Favor, PositiveLabel::Against};
    NeutralFairnessMode neutral_mode = NeutralFairnessMode::NotPositive;
    std::string target;                  // optional: restrict to one target
};

struct AuditCell {
    MetricKind metric = MetricKind::EO;
    std::string group;
    PositiveLabel direction = PositiveLabel::Favor;
    double mean = 0.0;
    double sd = 0.0;       // population standard deviation over defined samples
    int n_defined = 0;
    int n_missing = 0;
    bool degenerate = false;  // undefined in more than half the samples
};

struct AuditOverall {
    std::optional<double> weighted_f1;  // absent when every prediction is Neutral
    double neutral_rate = 0.0;
    std::optional<double> mean_abs_eo;
};

struct AuditResult {
    std::string model_id;
    std::string dataset;
    std::string target;     // "overall" when not restricted
    std::string attribute;
    std::vector<std::string> groups;
    int n_samples = 0;
    int per_group_size = 0;
    int pool_size = 0;  // records eligible for sampling
    std::uint64_t seed = 0;
    std::vector<AuditCell> cells;
    AuditOverall overall;
};

// Largest even size such that every (group x stance) stratum can supply
// per_group_size/2 records; validates an explicit size. Throws
// SamplingError naming the limiting stratum.
int resolve_per_group_size(const Corpus& corpus, const AuditConfig& config);

// Record ids of balanced sample `sample_index`: per_group_size/2 drawn
// uniformly without replacement from each (group x stance) stratum. A pure
// function of (corpus, config.seed, sample_index); predictions never
// influence the draw, so different models see identical samples.
std::vector<std::string> sample_record_ids(const Corpus& corpus, const AuditConfig& config,
                                           int sample_index);

EvalView draw_balanced_sample(const Corpus& corpus,
                              const std::map<std::string, StancePrediction>& predictions,
                              const AuditConfig& config, int sample_index);

// Full audit: n_samples balanced draws, EO/DI/PP per group per direction on
// each, aggregated as mean and population sd; plus whole-pool weighted F1,
// neutral rate and mean |EO|.
AuditResult run_audit(const Corpus& corpus,
                      const std::map<std::string, StancePrediction>& predictions,
                      const AuditConfig& config);

nlohmann::ordered_json audit_result_to_json(const AuditResult& result);
AuditResult audit_result_from_json(const nlohmann::json& j);
void write_audit_result(const AuditResult& result, const std::filesystem::path& path);
AuditResult load_audit_result(const std::filesystem::path& path);

} // namespace stancebias
