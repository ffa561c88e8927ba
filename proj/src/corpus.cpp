#include "stancebias/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stancebias/errors.hpp"
#include "stancebias/rng.hpp"

namespace stancebias {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
    return std::string(s.substr(b, e - b));
}

// RFC 4180 style: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Returns false at end of input.
    bool next_row(std::vector<std::string>& row) {
        row.clear();
        int c = in_.get();
        if (c == EOF) return false;
        std::string field;
        bool quoted = false;
        while (true) {
            if (c == EOF) {
                row.push_back(std::move(field));
                return true;
            }
            if (quoted) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(static_cast<char>(c));
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                row.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                row.push_back(std::move(field));
                return true;
            } else {
                field.push_back(static_cast<char>(c));
            }
            c = in_.get();
        }
    }

private:
    std::istream& in_;
};

Stance parse_stance_cell(const std::string& cell, std::size_t row_no) {
    auto stance = stance_from_string(cell);
    if (!stance.has_value()) {
        throw RowError("row " + std::to_string(row_no) + ": unknown stance value \"" + cell +
                       "\" (binary datasets carry only FAVOR/AGAINST)");
    }
    return *stance;
}

json readability_to_json(const ReadabilityAnnotation& r) {
    return json{{"w", r.words},
                {"se", r.sentences},
                {"sy", r.syllables},
                {"score", r.score},
                {"class", to_string(r.cls)}};
}

ReadabilityAnnotation readability_from_json(const json& j, std::size_t line_no) {
    ReadabilityAnnotation r;
    try {
        r.words = j.at("w").get<int>();
        r.sentences = j.at("se").get<int>();
        r.syllables = j.at("sy").get<int>();
        r.score = j.at("score").get<double>();
        auto cls = readability_class_from_string(j.at("class").get<std::string>());
        if (!cls.has_value()) throw RowError("");
        r.cls = *cls;
    } catch (const RowError&) {
        throw RowError("line " + std::to_string(line_no) + ": unknown readability class");
    } catch (const json::exception& e) {
        throw RowError("line " + std::to_string(line_no) + ": bad readability annotation: " + e.what());
    }
    return r;
}

json dialect_to_json(const DialectAnnotation& d) {
    json theta = nullptr;
    if (d.theta.has_value()) {
        theta = json::array();
        for (double v : *d.theta) theta.push_back(v);
    }
    return json{{"theta", theta}, {"label", to_string(d.label)}, {"in_vocab", d.in_vocab_tokens}};
}

DialectAnnotation dialect_from_json(const json& j, std::size_t line_no) {
    DialectAnnotation d;
    try {
        const json& theta = j.at("theta");
        if (!theta.is_null()) {
            if (!theta.is_array() || theta.size() != kDialectCategories) {
                throw RowError("line " + std::to_string(line_no) + ": dialect theta must have 4 entries");
            }
            CategoryWeights w{};
            for (int k = 0; k < kDialectCategories; ++k) {
                w[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)].get<double>();
            }
            d.theta = w;
        }
        auto label = dialect_label_from_string(j.at("label").get<std::string>());
        if (!label.has_value()) {
            throw RowError("line " + std::to_string(line_no) + ": unknown dialect label");
        }
        d.label = *label;
        d.in_vocab_tokens = j.at("in_vocab").get<int>();
    } catch (const json::exception& e) {
        throw RowError("line " + std::to_string(line_no) + ": bad dialect annotation: " + e.what());
    }
    return d;
}

} // namespace

std::optional<DatasetFormat> dataset_format_from_string(std::string_view name) {
    std::string n = trim(name);
    for (char& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == "pstance_csv" || n == "pstance") return DatasetFormat::PStanceCsv;
    if (n == "scd_csv" || n == "scd") return DatasetFormat::ScdCsv;
    if (n == "kemlm_csv" || n == "kemlm" || n == "ke-mlm") return DatasetFormat::KemlmCsv;
    if (n == "canonical_jsonl" || n == "jsonl" || n == "canonical") return DatasetFormat::CanonicalJsonl;
    return std::nullopt;
}

std::string to_string(DatasetFormat format) {
    switch (format) {
        case DatasetFormat::PStanceCsv: return "pstance_csv";
        case DatasetFormat::ScdCsv: return "scd_csv";
        case DatasetFormat::KemlmCsv: return "kemlm_csv";
        case DatasetFormat::CanonicalJsonl: return "canonical_jsonl";
    }
    return "canonical_jsonl";
}

CsvProfile profile_for(DatasetFormat format) {
    switch (format) {
        case DatasetFormat::PStanceCsv:
            return {"Tweet", "Target", "Stance", "", "pstance"};
        case DatasetFormat::ScdCsv:
            return {"post", "topic", "stance", "", "scd"};
        case DatasetFormat::KemlmCsv:
            return {"text", "target", "label", "tweet_id", "kemlm"};
        case DatasetFormat::CanonicalJsonl:
            break;
    }
    throw ConfigError("canonical_jsonl has no CSV profile");
}

Corpus::Corpus(std::vector<StanceRecord> records) : records_(std::move(records)) {
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const StanceRecord& r = records_[i];
        if (!seen.insert(r.id).second) {
            throw RowError("duplicate record id \"" + r.id + "\"");
        }
        if (trim(r.text).empty()) {
            throw RowError("record \"" + r.id + "\" has empty text");
        }
        by_target_[r.target].push_back(i);
    }
}

std::vector<std::string> Corpus::targets() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const StanceRecord& r : records_) {
        if (seen.insert(r.target).second) out.push_back(r.target);
    }
    return out;
}

const std::vector<std::size_t>& Corpus::indices_for_target(const std::string& target) const {
    static const std::vector<std::size_t> empty;
    auto it = by_target_.find(target);
    return it == by_target_.end() ? empty : it->second;
}

Corpus Corpus::filtered(const std::function<bool(const StanceRecord&)>& keep) const {
    std::vector<StanceRecord> out;
    for (const StanceRecord& r : records_) {
        if (keep(r)) out.push_back(r);
    }
    return Corpus(std::move(out));
}

Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    if (format == DatasetFormat::CanonicalJsonl) return load_canonical_jsonl(path);
    return load_csv(path, profile_for(format));
}

Corpus load_csv(const std::filesystem::path& path, const CsvProfile& profile) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path.string());

    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next_row(header)) {
        throw SchemaError(path.string() + ": empty file, expected a header row");
    }
    auto column = [&](const std::string& name, bool required) -> int {
        if (name.empty()) return -1;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return static_cast<int>(i);
        }
        if (required) {
            throw SchemaError(path.string() + ": missing required column \"" + name + "\"");
        }
        return -1;
    };
    int text_col = column(profile.text_column, true);
    int target_col = column(profile.target_column, true);
    int stance_col = column(profile.stance_column, true);
    int id_col = column(profile.id_column, false);

    std::vector<StanceRecord> records;
    std::vector<std::string> row;
    std::size_t row_no = 0;
    while (reader.next_row(row)) {
        ++row_no;
        if (row.size() == 1 && trim(row[0]).empty()) continue;  // blank line
        auto cell = [&](int idx) -> std::string {
            if (idx < 0 || static_cast<std::size_t>(idx) >= row.size()) {
                throw RowError("row " + std::to_string(row_no) + ": too few fields");
            }
            return row[static_cast<std::size_t>(idx)];
        };
        StanceRecord r;
        r.text = cell(text_col);
        if (trim(r.text).empty()) {
            throw RowError("row " + std::to_string(row_no) + ": empty text");
        }
        r.target = trim(cell(target_col));
        r.gold_stance = parse_stance_cell(trim(cell(stance_col)), row_no);
        r.dataset_tag = profile.dataset_tag;
        if (id_col >= 0 && !trim(cell(id_col)).empty()) {
            r.id = profile.dataset_tag + ":" + trim(cell(id_col));
        } else {
            r.id = profile.dataset_tag + ":" + std::to_string(row_no);
        }
        records.push_back(std::move(r));
    }
    return Corpus(std::move(records));
}

Corpus load_canonical_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + path.string());
    std::vector<StanceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw RowError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        records.push_back(record_from_json(j, "canonical", line_no));
    }
    return Corpus(std::move(records));
}

void write_canonical(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset: " + path.string());
    for (const StanceRecord& r : corpus) {
        out << record_to_json(r).dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ordered_json record_to_json(const StanceRecord& record) {
    ordered_json j;
    j["id"] = record.id;
    j["text"] = record.text;
    j["target"] = record.target;
    j["stance"] = to_string(record.gold_stance);
    j["dataset"] = record.dataset_tag;
    if (record.annotation.has_value()) {
        if (record.annotation->readability.has_value()) {
            j["readability"] = readability_to_json(*record.annotation->readability);
        }
        if (record.annotation->dialect.has_value()) {
            j["dialect"] = dialect_to_json(*record.annotation->dialect);
        }
    }
    return j;
}

StanceRecord record_from_json(const json& j, std::string_view default_tag, std::size_t line_no) {
    StanceRecord r;
    try {
        r.text = j.at("text").get<std::string>();
        r.target = j.value("target", std::string{});
        std::string stance = j.at("stance").get<std::string>();
        auto parsed = stance_from_string(stance);
        if (!parsed.has_value()) {
            throw RowError("line " + std::to_string(line_no) + ": unknown stance value \"" + stance + "\"");
        }
        r.gold_stance = *parsed;
        r.dataset_tag = j.value("dataset", std::string(default_tag));
        r.id = j.value("id", std::string{});
        if (r.id.empty()) r.id = r.dataset_tag + ":" + std::to_string(line_no);
    } catch (const json::exception& e) {
        throw RowError("line " + std::to_string(line_no) + ": missing record field: " + e.what());
    }
    if (j.contains("readability") || j.contains("dialect")) {
        AttributeAnnotation ann;
        if (j.contains("readability")) ann.readability = readability_from_json(j.at("readability"), line_no);
        if (j.contains("dialect")) ann.dialect = dialect_from_json(j.at("dialect"), line_no);
        r.annotation = std::move(ann);
    }
    return r;
}

namespace {

struct GroupStats {
    std::vector<std::size_t> favor;
    std::vector<std::size_t> against;
    std::size_t size() const { return favor.size() + against.size(); }
};

} // namespace

Corpus balance_two_group(const Corpus& corpus,
                         const std::function<bool(const StanceRecord&)>& in_group_a,
                         std::uint64_t seed) {
    GroupStats a, b;
    const auto& records = corpus.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        GroupStats& g = in_group_a(records[i]) ? a : b;
        (records[i].gold_stance == Stance::Favor ? g.favor : g.against).push_back(i);
    }
    if (a.size() == 0) throw BalanceError("group A is empty");
    if (b.size() == 0) throw BalanceError("group B is empty");
    if ((a.favor.empty() != b.favor.empty())) {
        throw BalanceError("stratum Favor is empty in one group but present in the other");
    }
    if ((a.against.empty() != b.against.empty())) {
        throw BalanceError("stratum Against is empty in one group but present in the other");
    }

    const GroupStats& minority = a.size() <= b.size() ? a : b;
    const GroupStats& majority = a.size() <= b.size() ? b : a;
    const std::size_t m = minority.size();

    // Target Favor count in the downsampled majority: nearest integer to
    // m * minority favor ratio, which is the minority's own favor count.
    const std::size_t favor_target = minority.favor.size();
    const std::size_t against_target = m - favor_target;
    if (majority.favor.size() < favor_target) {
        throw BalanceError("stratum Favor: need " + std::to_string(favor_target) + " records, group has " +
                           std::to_string(majority.favor.size()));
    }
    if (majority.against.size() < against_target) {
        throw BalanceError("stratum Against: need " + std::to_string(against_target) +
                           " records, group has " + std::to_string(majority.against.size()));
    }

    std::vector<bool> selected(records.size(), false);
    for (std::size_t i : minority.favor) selected[i] = true;
    for (std::size_t i : minority.against) selected[i] = true;

    Rng rng(splitmix64(seed));
    auto pick = [&](const std::vector<std::size_t>& stratum, std::size_t k) {
        for (std::size_t j : rng.sample_indices(stratum.size(), k)) selected[stratum[j]] = true;
    };
    pick(majority.favor, favor_target);
    pick(majority.against, against_target);

    std::vector<StanceRecord> out;
    out.reserve(2 * m);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (selected[i]) out.push_back(records[i]);
    }
    return Corpus(std::move(out));
}

Corpus attach_annotations(const Corpus& corpus,
                          const std::map<std::string, AttributeAnnotation>& annotations) {
    std::vector<std::string> missing;
    for (const StanceRecord& r : corpus) {
        if (annotations.find(r.id) == annotations.end()) missing.push_back(r.id);
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "missing annotations for " << missing.size() << " id(s):";
        std::size_t shown = std::min<std::size_t>(missing.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg << " " << missing[i];
        if (missing.size() > shown) msg << " ...";
        throw JoinError(msg.str());
    }
    std::vector<StanceRecord> out = corpus.records();
    for (StanceRecord& r : out) {
        r.annotation = annotations.at(r.id);
    }
    return Corpus(std::move(out));
}

} // namespace stancebias
