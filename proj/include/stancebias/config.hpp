#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stancebias/audit.hpp"
#include "stancebias/corpus.hpp"
#include "stancebias/llm.hpp"

namespace stancebias {

struct DatasetSpec {
    std::filesystem::path path;
    DatasetFormat format = DatasetFormat::CanonicalJsonl;
    std::string tag;  // defaults to the format profile's tag
};

struct AuditSpec {
    AuditConfig audit;
    std::vector<std::string> dataset_tags;  // empty = every configured dataset
};

struct PipelineConfig {
    std::vector<DatasetSpec> datasets;
    std::filesystem::path dialect_table;  // optional; empty = no dialect annotation
    std::vector<BackendDescriptor> backends;
    std::vector<AuditSpec> audits;
    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_path;  // optional; empty = in-memory cache
};

BackendDescriptor backend_from_json(const nlohmann::json& j);
AuditConfig audit_config_from_json(const nlohmann::json& j);

// Parses and validates a pipeline config; referenced input paths must
// exist. The API credential is never part of the file, only the name of
// the environment variable that holds it.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Digest of the canonical (sorted-key) JSON serialization; goes into run
// manifests so outputs can be traced back to an exact configuration.
std::string config_digest(const nlohmann::json& j);

// Writes manifest.json next to the outputs of a run.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::string& digest, std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

inline constexpr const char* kToolName = "stance_audit";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace stancebias
