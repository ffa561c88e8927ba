#include "stancebias/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "stancebias/errors.hpp"
#include "stancebias/rng.hpp"

namespace stancebias {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

} // namespace

BackendDescriptor backend_from_json(const json& j) {
    BackendDescriptor d;
    std::string kind = j.value("kind", "mock_rule");
    auto parsed = backend_kind_from_string(kind);
    if (!parsed.has_value()) throw ConfigError("unknown backend kind: " + kind);
    d.kind = *parsed;
    d.model_id = j.value("model", to_string(d.kind));
    d.endpoint = j.value("endpoint", "");
    d.api_key_env = j.value("api_key_env", "");
    d.temperature = j.value("temperature", 0.0);
    d.max_response_tokens = j.value("max_tokens", 16);
    d.timeout_seconds = j.value("timeout_s", 30);
    d.max_retries = j.value("max_retries", 3);
    d.max_in_flight = j.value("max_in_flight", 1);
    d.backoff_initial_ms = j.value("backoff_initial_ms", 250);
    if (d.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (d.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (d.kind == BackendKind::HttpChat && d.endpoint.empty()) {
        throw ConfigError("http_chat backend needs an endpoint");
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        d.oracle.attribute = o.value("attribute", "dialect");
        d.oracle.group_a = o.value("group_a", "");
        d.oracle.tpr_a = o.value("tpr_a", 0.9);
        d.oracle.tpr_b = o.value("tpr_b", 0.6);
        d.oracle.tnr_a = o.value("tnr_a", 0.85);
        d.oracle.tnr_b = o.value("tnr_b", 0.85);
        d.oracle.seed = o.value("seed", 0ULL);
    }
    return d;
}

AuditConfig audit_config_from_json(const json& j) {
    AuditConfig c;
    std::string attr = j.value("attribute", "dialect");
    auto parsed = audit_attribute_from_string(attr);
    if (!parsed.has_value()) throw ConfigError("unknown audit attribute: " + attr);
    c.attribute = *parsed;
    c.groups = j.value("groups", std::vector<std::string>{});
    if (c.groups.empty()) {
        c.groups = c.attribute == AuditAttribute::Dialect
                       ? std::vector<std::string>{"AAE", "SAE"}
                       : std::vector<std::string>{"Easy", "Medium", "Difficult", "VeryDifficult"};
    }
    for (const std::string& g : c.groups) {
        bool valid = c.attribute == AuditAttribute::Dialect
                         ? dialect_label_from_string(g).has_value()
                         : readability_class_from_string(g).has_value();
        if (!valid) {
            throw ConfigError("group \"" + g + "\" is not a value of attribute " + attr);
        }
    }
    c.n_samples = j.value("n_samples", 1000);
    if (c.n_samples < 1) throw ConfigError("n_samples must be >= 1");
    c.seed = j.value("seed", 0ULL);
    if (j.contains("per_group_size") && !j.at("per_group_size").is_string()) {
        c.per_group_size = j.at("per_group_size").get<int>();
    }  // the string "auto" (or absence) keeps 0 = auto
    if (j.contains("directions")) {
        c.directions.clear();
        for (const json& dj : j.at("directions")) {
            auto dir = positive_label_from_string(dj.get<std::string>());
            if (!dir.has_value()) throw ConfigError("unknown direction in audit config");
            c.directions.push_back(*dir);
        }
        if (c.directions.empty()) throw ConfigError("directions must not be empty");
    }
    c.neutral_mode = j.value("drop_neutral_fairness", false) ? NeutralFairnessMode::Drop
                                                             : NeutralFairnessMode::NotPositive;
    c.target = j.value("target", "");
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }

    PipelineConfig cfg;
    try {
        for (const json& dj : j.at("datasets")) {
            DatasetSpec spec;
            spec.path = dj.at("path").get<std::string>();
            auto format = dataset_format_from_string(dj.at("format").get<std::string>());
            if (!format.has_value()) {
                throw ConfigError("unknown dataset format: " + dj.at("format").get<std::string>());
            }
            spec.format = *format;
            spec.tag = dj.value("tag", spec.format == DatasetFormat::CanonicalJsonl
                                           ? std::string("canonical")
                                           : profile_for(spec.format).dataset_tag);
            cfg.datasets.push_back(std::move(spec));
        }
        if (j.contains("dialect_table")) cfg.dialect_table = j.at("dialect_table").get<std::string>();
        if (j.contains("backends")) {
            for (const json& bj : j.at("backends")) cfg.backends.push_back(backend_from_json(bj));
        } else if (j.contains("backend")) {
            cfg.backends.push_back(backend_from_json(j.at("backend")));
        }
        if (j.contains("audits")) {
            for (const json& aj : j.at("audits")) {
                AuditSpec spec;
                spec.audit = audit_config_from_json(aj);
                spec.dataset_tags = aj.value("datasets", std::vector<std::string>{});
                cfg.audits.push_back(std::move(spec));
            }
        }
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("cache")) cfg.cache_path = j.at("cache").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }

    if (cfg.datasets.empty()) throw ConfigError(path.string() + ": no datasets configured");
    for (const DatasetSpec& d : cfg.datasets) {
        if (!std::filesystem::exists(d.path)) {
            throw ConfigError("dataset path does not exist: " + d.path.string());
        }
    }
    if (!cfg.dialect_table.empty() && !std::filesystem::exists(cfg.dialect_table)) {
        throw ConfigError("dialect table does not exist: " + cfg.dialect_table.string());
    }
    return cfg;
}

std::string config_digest(const json& j) {
    // json::dump sorts object keys, so the digest is layout-independent.
    std::uint64_t h = fnv1a64(json(j).dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::string& digest, std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    std::filesystem::create_directories(dir);
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config_digest"] = digest;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    std::filesystem::path path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace stancebias
