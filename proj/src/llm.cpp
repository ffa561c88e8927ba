#include "stancebias/llm.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "stancebias/errors.hpp"
#include "stancebias/rng.hpp"
#include "stancebias/tokenize.hpp"

#include <httplib.h>

namespace stancebias {

namespace {

using nlohmann::json;

constexpr std::string_view kPromptTemplate =
    "Stance classification is the task of determining the expressed or implied opinion, or "
    "stance, of a statement toward a certain, specified target.\n"
    "Analyze the following social media statement and determine its stance towards the provided "
    "[target]. Respond with a single word: FAVOR or AGAINST. Only return the stance as a single "
    "word, and no other text.\n"
    "[target]: {TARGET}\n"
    "Statement: {TEXT}\n";

std::string replace_once(std::string text, std::string_view slot, std::string_view value) {
    std::size_t pos = text.find(slot);
    text.replace(pos, slot.size(), value);
    return text;
}

} // namespace

PromptInstance build_prompt(std::string_view target, std::string_view statement) {
    if (target.empty()) throw InputError("prompt target is empty");
    if (statement.empty()) throw InputError("prompt statement is empty");
    PromptInstance p;
    p.target = std::string(target);
    p.statement = std::string(statement);
    p.rendered = replace_once(std::string(kPromptTemplate), "{TARGET}", target);
    p.rendered = replace_once(std::move(p.rendered), "{TEXT}", statement);
    return p;
}

PredictedStance parse_stance(std::string_view raw) {
    std::string_view s = raw;
    auto trim = [&] {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
    };
    auto is_quote = [](char c) { return c == '"' || c == '\'' || c == '`'; };
    auto is_terminal = [](char c) {
        return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
    };
    bool changed = true;
    while (changed) {
        changed = false;
        trim();
        if (s.size() >= 2 && is_quote(s.front()) && s.back() == s.front()) {
            s.remove_prefix(1);
            s.remove_suffix(1);
            changed = true;
        }
        while (!s.empty() && is_terminal(s.back())) {
            s.remove_suffix(1);
            changed = true;
        }
    }
    std::string normalized = lowercase_ascii(s);
    if (normalized == "favor") return PredictedStance::Favor;
    if (normalized == "against") return PredictedStance::Against;
    return PredictedStance::Neutral;
}

std::optional<BackendKind> backend_kind_from_string(std::string_view name) {
    std::string n = lowercase_ascii(name);
    for (char& c : n) {
        if (c == '-') c = '_';
    }
    if (n == "http_chat" || n == "http") return BackendKind::HttpChat;
    if (n == "mock_rule") return BackendKind::MockRule;
    if (n == "mock_biased_oracle" || n == "biased_oracle") return BackendKind::MockBiasedOracle;
    return std::nullopt;
}

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::HttpChat: return "http_chat";
        case BackendKind::MockRule: return "mock_rule";
        case BackendKind::MockBiasedOracle: return "mock_biased_oracle";
    }
    return "mock_rule";
}

// ---------------------------------------------------------------------------
// Cache

PredictionCache::PredictionCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // first run: file appears on the first put
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            Entry e;
            e.model = j.at("model").get<std::string>();
            e.raw = j.at("raw").get<std::string>();
            auto stance = predicted_stance_from_string(j.at("stance").get<std::string>());
            if (!stance.has_value()) throw CacheError("");
            e.stance = *stance;
            entries_[j.at("key").get<std::string>()] = std::move(e);  // last write wins
        } catch (const std::exception&) {
            throw CacheError("cache file " + path_.string() + " is corrupt at line " +
                             std::to_string(line_no) + "; delete it to rebuild");
        }
    }
}

std::string PredictionCache::key_for(std::string_view model_id, std::string_view rendered) {
    std::uint64_t h = fnv1a64(model_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(rendered, h);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::optional<PredictionCache::Entry> PredictionCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void PredictionCache::put(const std::string& key, const Entry& entry) {
    std::lock_guard lock(mutex_);
    entries_[key] = entry;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw CacheError("cannot append to cache file: " + path_.string());
    json j{{"key", key},
           {"model", entry.model},
           {"stance", to_string(entry.stance)},
           {"raw", entry.raw},
           {"timestamp", static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count())}};
    out << j.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Backends

namespace {

class MockRuleBackend : public StanceBackend {
public:
    Reply complete(const StanceRecord& record, const PromptInstance&) override {
        std::string text = lowercase_ascii(record.text);
        std::string target = lowercase_ascii(record.target);
        if (text.find("love " + target) != std::string::npos) return {Reply::Status::Ok, "FAVOR"};
        if (text.find("hate " + target) != std::string::npos) return {Reply::Status::Ok, "AGAINST"};
        return {Reply::Status::Ok, "unsure"};
    }
};

class BiasedOracleBackend : public StanceBackend {
public:
    explicit BiasedOracleBackend(BiasedOracleParams params) : params_(std::move(params)) {}

    Reply complete(const StanceRecord& record, const PromptInstance&) override {
        bool in_a = attribute_matches(record);
        double tpr = in_a ? params_.tpr_a : params_.tpr_b;
        double tnr = in_a ? params_.tnr_a : params_.tnr_b;
        // Per-record coin derived from (seed, id): order-independent and
        // stable across runs.
        std::uint64_t h = fnv1a64(record.id, splitmix64(params_.seed));
        double u = unit_double(splitmix64(h));
        bool correct = record.gold_stance == Stance::Favor ? (u < tpr) : (u < tnr);
        Stance answer = correct ? record.gold_stance
                                : (record.gold_stance == Stance::Favor ? Stance::Against : Stance::Favor);
        return {Reply::Status::Ok, to_string(answer)};
    }

private:
    bool attribute_matches(const StanceRecord& record) const {
        if (!record.annotation.has_value()) return false;
        if (params_.attribute == "readability") {
            return record.annotation->readability.has_value() &&
                   to_string(record.annotation->readability->cls) == params_.group_a;
        }
        return record.annotation->dialect.has_value() &&
               to_string(record.annotation->dialect->label) == params_.group_a;
    }

    BiasedOracleParams params_;
};

class HttpChatBackend : public StanceBackend {
public:
    explicit HttpChatBackend(const BackendDescriptor& d) : descriptor_(d) {
        auto scheme_end = d.endpoint.find("://");
        if (scheme_end == std::string::npos) {
            throw ConfigError("http backend endpoint must include a scheme: " + d.endpoint);
        }
        auto path_start = d.endpoint.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = d.endpoint;
            path_ = "/";
        } else {
            base_ = d.endpoint.substr(0, path_start);
            path_ = d.endpoint.substr(path_start);
        }
        if (!d.api_key_env.empty()) {
            if (const char* key = std::getenv(d.api_key_env.c_str())) {
                bearer_ = key;
            } else {
                throw ConfigError("environment variable " + d.api_key_env + " is not set");
            }
        }
    }

    Reply complete(const StanceRecord&, const PromptInstance& prompt) override {
        json body{{"model", descriptor_.model_id},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt.rendered}}})},
                  {"temperature", descriptor_.temperature},
                  {"max_tokens", descriptor_.max_response_tokens}};
        httplib::Client client(base_);
        client.set_connection_timeout(descriptor_.timeout_seconds, 0);
        client.set_read_timeout(descriptor_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            return {Reply::Status::Transient, "network error: " + httplib::to_string(res.error())};
        }
        if (res->status == 429 || res->status >= 500) {
            return {Reply::Status::Transient, "HTTP " + std::to_string(res->status)};
        }
        if (res->status != 200) {
            return {Reply::Status::Permanent, "HTTP " + std::to_string(res->status) + ": " + res->body};
        }
        try {
            json j = json::parse(res->body);
            return {Reply::Status::Ok,
                    j.at("choices").at(0).at("message").at("content").get<std::string>()};
        } catch (const std::exception& e) {
            return {Reply::Status::Permanent, std::string("unparseable response: ") + e.what()};
        }
    }

private:
    BackendDescriptor descriptor_;
    std::string base_;
    std::string path_;
    std::string bearer_;
};

} // namespace

std::unique_ptr<StanceBackend> make_backend(const BackendDescriptor& descriptor) {
    switch (descriptor.kind) {
        case BackendKind::MockRule:
            return std::make_unique<MockRuleBackend>();
        case BackendKind::MockBiasedOracle:
            return std::make_unique<BiasedOracleBackend>(descriptor.oracle);
        case BackendKind::HttpChat:
            return std::make_unique<HttpChatBackend>(descriptor);
    }
    throw ConfigError("unknown backend kind");
}

// ---------------------------------------------------------------------------
// Batch runner

namespace {

struct WorkerState {
    std::atomic<std::size_t> next{0};
    std::mutex result_mutex;
};

} // namespace

BatchResult run_batch(const Corpus& corpus, const BackendDescriptor& descriptor,
                      PredictionCache& cache) {
    auto backend = make_backend(descriptor);
    return run_batch(corpus, *backend, descriptor, cache);
}

BatchResult run_batch(const Corpus& corpus, StanceBackend& backend,
                      const BackendDescriptor& descriptor, PredictionCache& cache) {
    BatchResult result;
    if (corpus.empty()) return result;

    const auto& records = corpus.records();
    WorkerState state;
    std::atomic<std::size_t> cache_hits{0};
    std::atomic<std::size_t> backend_calls{0};
    std::atomic<std::size_t> retries{0};

    auto process = [&](const StanceRecord& record) {
        PromptInstance prompt = build_prompt(record.target, record.text);
        std::string key = PredictionCache::key_for(descriptor.model_id, prompt.rendered);

        if (auto hit = cache.lookup(key)) {
            cache_hits.fetch_add(1, std::memory_order_relaxed);
            StancePrediction p{record.id, hit->model, hit->raw, hit->stance};
            std::lock_guard lock(state.result_mutex);
            result.predictions.emplace(record.id, std::move(p));
            return;
        }

        int attempts = 0;
        int backoff_ms = descriptor.backoff_initial_ms;
        while (true) {
            ++attempts;
            backend_calls.fetch_add(1, std::memory_order_relaxed);
            StanceBackend::Reply reply = backend.complete(record, prompt);
            if (reply.status == StanceBackend::Reply::Status::Ok) {
                StancePrediction p{record.id, descriptor.model_id, reply.text,
                                   parse_stance(reply.text)};
                cache.put(key, {descriptor.model_id, p.raw, p.stance});
                std::lock_guard lock(state.result_mutex);
                result.predictions.emplace(record.id, std::move(p));
                return;
            }
            bool transient = reply.status == StanceBackend::Reply::Status::Transient;
            if (!transient || attempts > descriptor.max_retries) {
                std::lock_guard lock(state.result_mutex);
                result.failures.push_back({record.id, reply.text, attempts});
                return;
            }
            retries.fetch_add(1, std::memory_order_relaxed);
            std::this_thread::sleep_for(std::chrono::milliseconds(std::min(backoff_ms, 8000)));
            backoff_ms *= 2;
        }
    };

    auto worker = [&] {
        while (true) {
            std::size_t i = state.next.fetch_add(1, std::memory_order_relaxed);
            if (i >= records.size()) return;
            process(records[i]);
        }
    };

    int n_threads = std::max(1, descriptor.max_in_flight);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    result.cache_hits = cache_hits.load();
    result.backend_calls = backend_calls.load();
    result.retries = retries.load();
    if (result.predictions.empty() && !result.failures.empty()) {
        throw BatchError("all " + std::to_string(result.failures.size()) + " records failed; first error: " +
                         result.failures.front().error);
    }
    return result;
}

void write_predictions(const std::map<std::string, StancePrediction>& predictions,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write predictions: " + path.string());
    for (const auto& [id, p] : predictions) {
        nlohmann::ordered_json j;
        j["id"] = p.record_id;
        j["model"] = p.model_id;
        j["stance"] = to_string(p.stance);
        j["raw"] = p.raw;
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, StancePrediction> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open predictions: " + path.string());
    std::map<std::string, StancePrediction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            StancePrediction p;
            p.record_id = j.at("id").get<std::string>();
            p.model_id = j.at("model").get<std::string>();
            p.raw = j.at("raw").get<std::string>();
            auto stance = predicted_stance_from_string(j.at("stance").get<std::string>());
            if (!stance.has_value()) throw RowError("");
            p.stance = *stance;
            out[p.record_id] = std::move(p);
        } catch (const std::exception&) {
            throw RowError("predictions file " + path.string() + " line " + std::to_string(line_no) +
                           " is malformed");
        }
    }
    return out;
}

} // namespace stancebias
