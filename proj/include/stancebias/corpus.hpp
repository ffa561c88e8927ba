#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stancebias/dialect.hpp"
#include "stancebias/readability.hpp"
#include "stancebias/stance.hpp"

namespace stancebias {

struct AttributeAnnotation {
    std::optional<ReadabilityAnnotation> readability;
    std::optional<DialectAnnotation> dialect;
};

struct StanceRecord {
    std::string id;
    std::string text;
    std::string target;
    Stance gold_stance = Stance::Favor;
    std::string dataset_tag;
    std::optional<AttributeAnnotation> annotation;
};

enum class DatasetFormat { PStanceCsv, ScdCsv, KemlmCsv, CanonicalJsonl };

std::optional<DatasetFormat> dataset_format_from_string(std::string_view name);
std::string to_string(DatasetFormat format);

// The three source datasets name their columns differently; a profile maps
// them onto (text, target, stance). id_column is optional; missing ids are
// synthesized as dataset_tag:row.
struct CsvProfile {
    std::string text_column;
    std::string target_column;
    std::string stance_column;
    std::string id_column;  // empty = synthesize
    std::string dataset_tag;
};

CsvProfile profile_for(DatasetFormat format);

// Ordered record collection with unique ids and a per-target index.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<StanceRecord> records);  // throws on duplicate ids

    const std::vector<StanceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

    // Distinct targets in first-seen order.
    std::vector<std::string> targets() const;
    const std::vector<std::size_t>& indices_for_target(const std::string& target) const;

    Corpus filtered(const std::function<bool(const StanceRecord&)>& keep) const;

private:
    std::vector<StanceRecord> records_;
    std::map<std::string, std::vector<std::size_t>> by_target_;
};

Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format);
Corpus load_csv(const std::filesystem::path& path, const CsvProfile& profile);
Corpus load_canonical_jsonl(const std::filesystem::path& path);

void write_canonical(const Corpus& corpus, const std::filesystem::path& path);

// Downsamples the larger group to the smaller one's size, matching its
// Favor proportion (rounded to the nearest achievable count); selection
// within each (stance) stratum is uniform under the seed. Output keeps
// corpus order. Equal-size inputs must already match or this throws.
Corpus balance_two_group(const Corpus& corpus,
                         const std::function<bool(const StanceRecord&)>& in_group_a,
                         std::uint64_t seed);

// Joins annotations onto records by id; every id must be present.
Corpus attach_annotations(const Corpus& corpus,
                          const std::map<std::string, AttributeAnnotation>& annotations);

nlohmann::ordered_json record_to_json(const StanceRecord& record);
StanceRecord record_from_json(const nlohmann::json& j, std::string_view default_tag,
                              std::size_t line_no);

} // namespace stancebias
