#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stancebias {

inline constexpr int kDialectCategories = 4;

// Fixed category order; argmax ties resolve toward the earlier entry.
enum class DialectCategory { AfricanAmerican = 0, Hispanic = 1, Asian = 2, Standard = 3 };

enum class DialectLabel { AAE, Hispanic, Asian, SAE, Unknown };

// Texts with fewer in-vocabulary tokens than this are labeled Unknown:
// one or two matched words are not enough evidence for a variety call.
inline constexpr int kMinInVocabForLabel = 3;

using CategoryWeights = std::array<double, kDialectCategories>;

// Per-word category probabilities p(w|k). Loaded from a TSV of
// token<TAB>w_aa<TAB>w_hisp<TAB>w_asian<TAB>w_sae; raw counts get add-alpha
// smoothing (alpha = 0.1) before each category column is normalized over
// the vocabulary.
class DialectTable {
public:
    static constexpr double kSmoothingAlpha = 0.1;

    static DialectTable load(const std::filesystem::path& path);
    static DialectTable from_counts(const std::vector<std::pair<std::string, CategoryWeights>>& counts);

    // nullptr for out-of-vocabulary tokens; token must already be lowercase.
    const CategoryWeights* lookup(std::string_view token) const;

    std::size_t vocabulary_size() const { return probs_.size(); }

    // Each entry sums to 1 over the vocabulary (within 1e-9).
    CategoryWeights column_sums() const;

private:
    explicit DialectTable(std::unordered_map<std::string, CategoryWeights> probs)
        : probs_(std::move(probs)) {}

    std::unordered_map<std::string, CategoryWeights> probs_;
};

struct DialectAnnotation {
    // Mixture proportions over the four categories; absent when no token
    // was in vocabulary.
    std::optional<CategoryWeights> theta;
    DialectLabel label = DialectLabel::Unknown;
    int in_vocab_tokens = 0;
};

struct EmControl {
    double tolerance = 1e-6;  // stop when max |delta theta| drops below
    int max_iterations = 100;
};

struct EmTrace {
    std::vector<double> log_likelihood;   // one entry per completed iteration
    std::vector<CategoryWeights> thetas;  // theta after each iteration
    int iterations = 0;
};

// Estimates theta for the token mixture by EM: uniform start,
// responsibilities r_tk ~ theta_k p(w_t|k), theta_k = mean_t r_tk.
// Out-of-vocabulary tokens are skipped. Label is Unknown below the
// evidence threshold; otherwise the argmax category.
DialectAnnotation infer_proportions(std::string_view text, const DialectTable& table);
DialectAnnotation infer_proportions(std::string_view text, const DialectTable& table,
                                    const EmControl& control, EmTrace* trace = nullptr);

// Argmax of theta with the fixed-order tie rule; Unknown passes through.
DialectLabel dialect_label(const DialectAnnotation& annotation);

std::string to_string(DialectLabel label);
std::optional<DialectLabel> dialect_label_from_string(std::string_view name);

} // namespace stancebias
