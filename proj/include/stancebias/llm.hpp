#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancebias/corpus.hpp"
#include "stancebias/stance.hpp"

namespace stancebias {

struct PromptInstance {
    std::string target;
    std::string statement;
    std::string rendered;
};

// Renders the fixed classification prompt; output bytes are stable. Throws
// InputError if target or statement is empty.
PromptInstance build_prompt(std::string_view target, std::string_view statement);

// Maps a raw model response to a stance. The response is trimmed,
// unquoted, stripped of terminal punctuation and lowercased; only an exact
// "favor"/"against" counts. Everything else (refusals, explanations,
// "FAVOR, because...") is Neutral.
PredictedStance parse_stance(std::string_view raw);

struct StancePrediction {
    std::string record_id;
    std::string model_id;
    std::string raw;
    PredictedStance stance = PredictedStance::Neutral;
};

enum class BackendKind { HttpChat, MockRule, MockBiasedOracle };

std::optional<BackendKind> backend_kind_from_string(std::string_view name);
std::string to_string(BackendKind kind);

// Synthetic backend with controllable per-group true/true-negative rates;
// the only way to run quantitative bias-recovery checks offline.
struct BiasedOracleParams {
    std::string attribute = "dialect";  // "dialect" or "readability"
    std::string group_a;                // records with this attribute value get the _a rates
    double tpr_a = 0.9;
    double tpr_b = 0.6;
    double tnr_a = 0.85;
    double tnr_b = 0.85;
    std::uint64_t seed = 0;
};

struct BackendDescriptor {
    BackendKind kind = BackendKind::MockRule;
    std::string model_id = "mock-rule";

    // http_chat
    std::string endpoint;               // e.g. http://host:port/v1/chat/completions
    std::string api_key_env;            // name of the env var holding the bearer token
    double temperature = 0.0;
    int max_response_tokens = 16;
    int timeout_seconds = 30;

    int max_retries = 3;
    int max_in_flight = 1;
    int backoff_initial_ms = 250;       // doubles per retry, capped at 8s

    BiasedOracleParams oracle;          // mock_biased_oracle only
};

// Append-only JSONL prediction cache keyed by digest(model, rendered
// prompt); duplicate keys resolve last-write-wins. A malformed line throws
// CacheError (delete the file to rebuild).
class PredictionCache {
public:
    struct Entry {
        std::string model;
        std::string raw;
        PredictedStance stance = PredictedStance::Neutral;
    };

    PredictionCache() = default;  // in-memory only
    explicit PredictionCache(std::filesystem::path path);

    static std::string key_for(std::string_view model_id, std::string_view rendered);

    std::optional<Entry> lookup(const std::string& key) const;
    void put(const std::string& key, const Entry& entry);

    std::size_t size() const { return entries_.size(); }

private:
    std::filesystem::path path_;  // empty = no persistence
    std::map<std::string, Entry> entries_;
    mutable std::mutex mutex_;
};

class StanceBackend {
public:
    struct Reply {
        enum class Status { Ok, Transient, Permanent };
        Status status = Status::Ok;
        std::string text;  // response body or error description
    };

    virtual ~StanceBackend() = default;
    virtual Reply complete(const StanceRecord& record, const PromptInstance& prompt) = 0;
};

std::unique_ptr<StanceBackend> make_backend(const BackendDescriptor& descriptor);

struct BatchFailure {
    std::string record_id;
    std::string error;
    int attempts = 0;
};

struct BatchResult {
    std::map<std::string, StancePrediction> predictions;  // by record id
    std::vector<BatchFailure> failures;
    std::size_t cache_hits = 0;
    std::size_t backend_calls = 0;  // every attempt, including retries
    std::size_t retries = 0;
};

// One prediction per record; cache hits skip the backend, transient
// failures retry with exponential backoff, permanent failures are reported
// in the result. Throws BatchError if nothing succeeded.
BatchResult run_batch(const Corpus& corpus, const BackendDescriptor& descriptor,
                      PredictionCache& cache);
BatchResult run_batch(const Corpus& corpus, StanceBackend& backend,
                      const BackendDescriptor& descriptor, PredictionCache& cache);

void write_predictions(const std::map<std::string, StancePrediction>& predictions,
                       const std::filesystem::path& path);
std::map<std::string, StancePrediction> load_predictions(const std::filesystem::path& path);

} // namespace stancebias
