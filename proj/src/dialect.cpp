#include "stancebias/dialect.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "stancebias/errors.hpp"
#include "stancebias/tokenize.hpp"

namespace stancebias {

namespace {

std::unordered_map<std::string, CategoryWeights> normalize_counts(
    std::unordered_map<std::string, CategoryWeights>&& counts);

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

} // namespace

DialectTable DialectTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dialect table: " + path.string());

    std::unordered_map<std::string, CategoryWeights> counts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != 1 + kDialectCategories) {
            throw SchemaError("dialect table line " + std::to_string(line_no) + ": expected token + " +
                              std::to_string(kDialectCategories) + " weight columns, got " +
                              std::to_string(fields.size()));
        }
        CategoryWeights w{};
        for (int k = 0; k < kDialectCategories; ++k) {
            const std::string& f = fields[static_cast<std::size_t>(k) + 1];
            std::size_t consumed = 0;
            double v = 0.0;
            try {
                v = std::stod(f, &consumed);
            } catch (const std::exception&) {
                throw TableParseError("dialect table line " + std::to_string(line_no) +
                                      ": weight is not a number: \"" + f + "\"");
            }
            if (consumed != f.size() || !std::isfinite(v) || v < 0.0) {
                throw TableParseError("dialect table line " + std::to_string(line_no) +
                                      ": weight must be a non-negative number: \"" + f + "\"");
            }
            w[static_cast<std::size_t>(k)] = v;
        }
        std::string token = lowercase_ascii(fields[0]);
        auto [it, inserted] = counts.emplace(std::move(token), w);
        if (!inserted) {
            for (int k = 0; k < kDialectCategories; ++k) {
                it->second[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)];
            }
        }
    }
    if (counts.empty()) throw TableLoadError("dialect table is empty: " + path.string());
    return DialectTable(normalize_counts(std::move(counts)));
}

DialectTable DialectTable::from_counts(const std::vector<std::pair<std::string, CategoryWeights>>& raw) {
    std::unordered_map<std::string, CategoryWeights> counts;
    for (const auto& [token, w] : raw) {
        auto [it, inserted] = counts.emplace(lowercase_ascii(token), w);
        if (!inserted) {
            for (int k = 0; k < kDialectCategories; ++k) {
                it->second[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)];
            }
        }
    }
    if (counts.empty()) throw TableLoadError("dialect table is empty");
    return DialectTable(normalize_counts(std::move(counts)));
}

namespace {

std::unordered_map<std::string, CategoryWeights> normalize_counts(
    std::unordered_map<std::string, CategoryWeights>&& counts) {
    CategoryWeights totals{};
    const double alpha = DialectTable::kSmoothingAlpha;
    for (auto& [token, w] : counts) {
        for (int k = 0; k < kDialectCategories; ++k) {
            totals[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)] + alpha;
        }
    }
    for (auto& [token, w] : counts) {
        for (int k = 0; k < kDialectCategories; ++k) {
            auto ks = static_cast<std::size_t>(k);
            w[ks] = (w[ks] + alpha) / totals[ks];
        }
    }
    return counts;
}

} // namespace

const CategoryWeights* DialectTable::lookup(std::string_view token) const {
    auto it = probs_.find(std::string(token));
    return it == probs_.end() ? nullptr : &it->second;
}

CategoryWeights DialectTable::column_sums() const {
    CategoryWeights sums{};
    for (const auto& [token, w] : probs_) {
        for (int k = 0; k < kDialectCategories; ++k) {
            sums[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)];
        }
    }
    return sums;
}

namespace {

DialectLabel label_for_category(int k) {
    switch (static_cast<DialectCategory>(k)) {
        case DialectCategory::AfricanAmerican: return DialectLabel::AAE;
        case DialectCategory::Hispanic: return DialectLabel::Hispanic;
        case DialectCategory::Asian: return DialectLabel::Asian;
        case DialectCategory::Standard: return DialectLabel::SAE;
    }
    return DialectLabel::Unknown;
}

DialectLabel argmax_label(const CategoryWeights& theta) {
    int best = 0;
    for (int k = 1; k < kDialectCategories; ++k) {
        if (theta[static_cast<std::size_t>(k)] > theta[static_cast<std::size_t>(best)]) best = k;
    }
    return label_for_category(best);
}

} // namespace

DialectAnnotation infer_proportions(std::string_view text, const DialectTable& table) {
    return infer_proportions(text, table, EmControl{});
}

DialectAnnotation infer_proportions(std::string_view text, const DialectTable& table,
                                    const EmControl& control, EmTrace* trace) {
    std::vector<const CategoryWeights*> likelihoods;
    for (const std::string& token : word_tokens(text)) {
        if (const CategoryWeights* p = table.lookup(lowercase_ascii(token))) {
            likelihoods.push_back(p);
        }
    }

    DialectAnnotation ann;
    ann.in_vocab_tokens = static_cast<int>(likelihoods.size());
    if (likelihoods.empty()) {
        ann.label = DialectLabel::Unknown;
        return ann;
    }

    CategoryWeights theta;
    theta.fill(1.0 / kDialectCategories);
    const auto t_count = static_cast<double>(likelihoods.size());

    for (int iter = 0; iter < control.max_iterations; ++iter) {
        CategoryWeights next{};
        double log_lik = 0.0;
        for (const CategoryWeights* p : likelihoods) {
            CategoryWeights r;
            double denom = 0.0;
            for (int k = 0; k < kDialectCategories; ++k) {
                auto ks = static_cast<std::size_t>(k);
                r[ks] = theta[ks] * (*p)[ks];
                denom += r[ks];
            }
            log_lik += std::log(denom);
            for (int k = 0; k < kDialectCategories; ++k) {
                auto ks = static_cast<std::size_t>(k);
                next[ks] += r[ks] / denom;
            }
        }
        for (int k = 0; k < kDialectCategories; ++k) {
            next[static_cast<std::size_t>(k)] /= t_count;
        }
        if (trace != nullptr) {
            trace->log_likelihood.push_back(log_lik);
            trace->thetas.push_back(next);
            trace->iterations = iter + 1;
        }
        double max_delta = 0.0;
        for (int k = 0; k < kDialectCategories; ++k) {
            auto ks = static_cast<std::size_t>(k);
            max_delta = std::max(max_delta, std::abs(next[ks] - theta[ks]));
        }
        theta = next;
        if (max_delta < control.tolerance) break;
    }

    ann.theta = theta;
    if (ann.in_vocab_tokens >= kMinInVocabForLabel) {
        ann.label = argmax_label(theta);
    }
    return ann;
}

DialectLabel dialect_label(const DialectAnnotation& annotation) {
    if (annotation.label == DialectLabel::Unknown || !annotation.theta.has_value()) {
        return annotation.label;
    }
    return argmax_label(*annotation.theta);
}

std::string to_string(DialectLabel label) {
    switch (label) {
        case DialectLabel::AAE: return "AAE";
        case DialectLabel::Hispanic: return "Hispanic";
        case DialectLabel::Asian: return "Asian";
        case DialectLabel::SAE: return "SAE";
        case DialectLabel::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<DialectLabel> dialect_label_from_string(std::string_view name) {
    std::string n = lowercase_ascii(name);
    if (n == "aae" || n == "african-american" || n == "africanamerican") return DialectLabel::AAE;
    if (n == "hispanic") return DialectLabel::Hispanic;
    if (n == "asian") return DialectLabel::Asian;
    if (n == "sae" || n == "standard") return DialectLabel::SAE;
    if (n == "unknown") return DialectLabel::Unknown;
    return std::nullopt;
}

} // namespace stancebias
