#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stancebias/audit.hpp"
#include "stancebias/config.hpp"
#include "stancebias/corpus.hpp"
#include "stancebias/dialect.hpp"
#include "stancebias/errors.hpp"
#include "stancebias/llm.hpp"
#include "stancebias/readability.hpp"
#include "stancebias/report.hpp"

namespace fs = std::filesystem;
using namespace stancebias;

namespace {

std::string slug(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "all" : out;
}

Corpus annotate_corpus(const Corpus& corpus, const DialectTable* table) {
    std::map<std::string, AttributeAnnotation> annotations;
    for (const StanceRecord& r : corpus) {
        AttributeAnnotation ann;
        ann.readability = flesch_score(r.text);
        if (table != nullptr) ann.dialect = infer_proportions(r.text, *table);
        annotations[r.id] = std::move(ann);
    }
    return attach_annotations(corpus, annotations);
}

struct PredictStats {
    std::size_t predictions = 0;
    std::size_t failures = 0;
};

PredictStats predict_to_file(const Corpus& corpus, const BackendDescriptor& backend,
                             PredictionCache& cache, const fs::path& out_path) {
    BatchResult batch = run_batch(corpus, backend, cache);
    write_predictions(batch.predictions, out_path);
    if (!batch.failures.empty()) {
        fs::path fail_path = out_path;
        fail_path += ".failures.jsonl";
        std::ofstream out(fail_path, std::ios::binary);
        for (const BatchFailure& f : batch.failures) {
            nlohmann::ordered_json j;
            j["id"] = f.record_id;
            j["error"] = f.error;
            j["attempts"] = f.attempts;
            out << j.dump() << "\n";
        }
        std::cerr << batch.failures.size() << " record(s) failed; see " << fail_path << "\n";
    }
    std::cerr << "predicted " << batch.predictions.size() << " record(s), " << batch.cache_hits
              << " from cache, " << batch.retries << " retr(y/ies)\n";
    return {batch.predictions.size(), batch.failures.size()};
}

// Emits tables plus one EO plot per (dataset, target, attribute) present.
std::vector<std::string> emit_reports(const std::vector<AuditResult>& results,
                                      const fs::path& out_dir,
                                      const std::vector<MetricKind>& plot_metrics) {
    std::vector<std::string> outputs;
    for (const fs::path& p : emit_tables(results, out_dir / "tables")) {
        outputs.push_back(p.string());
    }
    std::map<std::string, std::vector<AuditResult>> panels;
    for (const AuditResult& r : results) {
        panels[r.dataset + "\x1f" + r.target + "\x1f" + r.attribute].push_back(r);
    }
    fs::create_directories(out_dir / "plots");
    for (const auto& [key, group] : panels) {
        const AuditResult& first = group.front();
        for (MetricKind metric : plot_metrics) {
            fs::path path = out_dir / "plots" /
                            (to_string(metric) + "_" + slug(first.dataset) + "_" +
                             slug(first.target) + "_" + slug(first.attribute) + ".svg");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write plot: " + path.string());
            out << render_metric_plot(group, metric);
            outputs.push_back(path.string());
        }
    }
    return outputs;
}

int cmd_annotate(const std::string& in, const std::string& format, const std::string& out,
                 const std::string& table_path) {
    auto fmt = dataset_format_from_string(format);
    if (!fmt.has_value()) throw ConfigError("unknown dataset format: " + format);
    Corpus corpus = load_dataset(in, *fmt);
    std::optional<DialectTable> table;
    if (!table_path.empty()) table = DialectTable::load(table_path);
    Corpus annotated = annotate_corpus(corpus, table.has_value() ? &*table : nullptr);
    write_canonical(annotated, out);
    std::cerr << "annotated " << annotated.size() << " record(s) -> " << out << "\n";
    return 0;
}

int cmd_balance(const std::string& in, const std::string& out, const std::string& attribute,
                const std::string& group_a, const std::string& group_b, std::uint64_t seed) {
    auto attr = audit_attribute_from_string(attribute);
    if (!attr.has_value()) throw ConfigError("unknown attribute: " + attribute);
    Corpus corpus = load_canonical_jsonl(in);
    Corpus pool = corpus.filtered([&](const StanceRecord& r) {
        std::string v = attribute_value(r, *attr);
        return v == group_a || v == group_b;
    });
    Corpus balanced = balance_two_group(
        pool, [&](const StanceRecord& r) { return attribute_value(r, *attr) == group_a; }, seed);
    write_canonical(balanced, out);
    std::cerr << "balanced " << pool.size() << " -> " << balanced.size() << " record(s)\n";
    return 0;
}

void run_config_pipeline(const PipelineConfig& cfg, const nlohmann::json& cfg_json,
                         const std::string& command, bool do_predict, bool do_audit,
                         bool do_report) {
    fs::create_directories(cfg.output_dir);
    std::optional<DialectTable> table;
    if (!cfg.dialect_table.empty()) table = DialectTable::load(cfg.dialect_table);

    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t manifest_seed = cfg.audits.empty() ? 0 : cfg.audits.front().audit.seed;

    std::vector<std::pair<std::string, Corpus>> annotated;  // tag -> corpus
    for (const DatasetSpec& spec : cfg.datasets) {
        inputs.push_back(spec.path.string());
        Corpus corpus;
        if (spec.format == DatasetFormat::CanonicalJsonl) {
            corpus = load_canonical_jsonl(spec.path);
        } else {
            CsvProfile profile = profile_for(spec.format);
            if (!spec.tag.empty()) profile.dataset_tag = spec.tag;
            corpus = load_csv(spec.path, profile);
        }
        Corpus ann = annotate_corpus(corpus, table.has_value() ? &*table : nullptr);
        fs::path out = cfg.output_dir / (spec.tag + ".annotated.jsonl");
        write_canonical(ann, out);
        outputs.push_back(out.string());
        annotated.emplace_back(spec.tag, std::move(ann));
    }

    std::vector<AuditResult> results;
    if (do_predict || do_audit) {
        if (cfg.backends.empty()) throw ConfigError("config has no backend");
        PredictionCache cache =
            cfg.cache_path.empty() ? PredictionCache() : PredictionCache(cfg.cache_path);
        fs::create_directories(cfg.output_dir / "predictions");
        fs::create_directories(cfg.output_dir / "results");
        for (const BackendDescriptor& backend : cfg.backends) {
            for (const auto& [tag, corpus] : annotated) {
                fs::path pred_path =
                    cfg.output_dir / "predictions" / (slug(backend.model_id) + "_" + tag + ".jsonl");
                predict_to_file(corpus, backend, cache, pred_path);
                outputs.push_back(pred_path.string());
                if (!do_audit) continue;
                std::map<std::string, StancePrediction> preds = load_predictions(pred_path);
                for (const AuditSpec& spec : cfg.audits) {
                    const auto& tags = spec.dataset_tags;
                    if (!tags.empty() && std::find(tags.begin(), tags.end(), tag) == tags.end()) {
                        continue;
                    }
                    AuditResult result = run_audit(corpus, preds, spec.audit);
                    fs::path rpath = cfg.output_dir / "results" /
                                     (slug(backend.model_id) + "_" + tag + "_" + result.attribute +
                                      "_" + slug(result.target) + ".json");
                    write_audit_result(result, rpath);
                    outputs.push_back(rpath.string());
                    results.push_back(std::move(result));
                }
            }
        }
    }

    if (do_audit && !results.empty()) {
        // the flat one-row-per-cell form always accompanies the result JSONs
        fs::path flat = cfg.output_dir / "results" / "fairness_long.csv";
        std::ofstream out(flat, std::ios::binary);
        out << render_fairness_long_csv(results);
        outputs.push_back(flat.string());
    }
    if (do_report && !results.empty()) {
        for (const std::string& p : emit_reports(results, cfg.output_dir, {MetricKind::EO})) {
            outputs.push_back(p);
        }
    }

    write_manifest(cfg.output_dir, command, config_digest(cfg_json), manifest_seed, inputs, outputs);
    std::cerr << command << " complete: " << outputs.size() << " output file(s) under "
              << cfg.output_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demographic bias audit for zero-shot stance detection"};
    app.require_subcommand(1);

    // annotate
    auto* annotate = app.add_subcommand("annotate", "Add readability/dialect annotations");
    std::string an_in, an_out, an_format = "canonical_jsonl", an_table;
    annotate->add_option("--in", an_in, "input dataset")->required();
    annotate->add_option("--out", an_out, "output JSONL")->required();
    annotate->add_option("--format", an_format, "pstance_csv|scd_csv|kemlm_csv|canonical_jsonl");
    annotate->add_option("--dialect-table", an_table, "token weight TSV");

    // balance
    auto* balance = app.add_subcommand("balance", "Two-group downsampling balance");
    std::string ba_in, ba_out, ba_attr = "dialect", ba_a = "AAE", ba_b = "SAE";
    std::uint64_t ba_seed = 0;
    balance->add_option("--in", ba_in)->required();
    balance->add_option("--out", ba_out)->required();
    balance->add_option("--attribute", ba_attr, "dialect|readability");
    balance->add_option("--group-a", ba_a);
    balance->add_option("--group-b", ba_b);
    balance->add_option("--seed", ba_seed);

    // predict
    auto* predict = app.add_subcommand("predict", "Query stance predictions from a backend");
    std::string pr_in, pr_out, pr_backend = "mock_rule", pr_model, pr_endpoint, pr_key_env,
                pr_cache;
    int pr_retries = 3, pr_in_flight = 1;
    BiasedOracleParams pr_oracle;
    predict->add_option("--in", pr_in)->required();
    predict->add_option("--out", pr_out)->required();
    predict->add_option("--backend", pr_backend, "http_chat|mock_rule|mock_biased_oracle");
    predict->add_option("--model", pr_model, "model identifier");
    predict->add_option("--endpoint", pr_endpoint, "chat-completion URL");
    predict->add_option("--api-key-env", pr_key_env, "env var holding the bearer token");
    predict->add_option("--cache", pr_cache, "prediction cache JSONL");
    predict->add_option("--max-retries", pr_retries);
    predict->add_option("--max-in-flight", pr_in_flight);
    predict->add_option("--oracle-attribute", pr_oracle.attribute);
    predict->add_option("--oracle-group-a", pr_oracle.group_a);
    predict->add_option("--tpr-a", pr_oracle.tpr_a);
    predict->add_option("--tpr-b", pr_oracle.tpr_b);
    predict->add_option("--tnr-a", pr_oracle.tnr_a);
    predict->add_option("--tnr-b", pr_oracle.tnr_b);
    predict->add_option("--oracle-seed", pr_oracle.seed);

    // audit
    auto* audit = app.add_subcommand("audit", "Bootstrap fairness audit");
    std::string au_config, au_in, au_preds, au_out = ".", au_attr = "dialect", au_target;
    std::vector<std::string> au_groups;
    int au_samples = 1000, au_pgs = 0;
    std::uint64_t au_seed = 0;
    bool au_drop_neutral = false;
    audit->add_option("--config", au_config, "pipeline config JSON");
    audit->add_option("--in", au_in, "annotated corpus JSONL");
    audit->add_option("--predictions", au_preds, "predictions JSONL");
    audit->add_option("--out", au_out, "output directory");
    audit->add_option("--attribute", au_attr, "dialect|readability");
    audit->add_option("--groups", au_groups, "group values (ordered)");
    audit->add_option("--n-samples", au_samples);
    audit->add_option("--seed", au_seed);
    audit->add_option("--per-group-size", au_pgs, "0 = auto");
    audit->add_option("--target", au_target, "restrict to one target");
    audit->add_flag("--drop-neutral", au_drop_neutral, "drop Neutral rows from fairness metrics");

    // report
    auto* report = app.add_subcommand("report", "Tables and whisker plots from audit results");
    std::vector<std::string> re_in;
    std::string re_out = "report";
    std::vector<std::string> re_metrics{"EO"};
    report->add_option("--in", re_in, "audit result JSON file(s)")->required();
    report->add_option("--out", re_out, "output directory");
    report->add_option("--metric", re_metrics, "EO|DI|PP (repeatable)");

    // all
    auto* all = app.add_subcommand("all", "annotate + predict + audit + report from a config");
    std::string all_config;
    all->add_option("--config", all_config, "pipeline config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (annotate->parsed()) return cmd_annotate(an_in, an_format, an_out, an_table);
        if (balance->parsed()) return cmd_balance(ba_in, ba_out, ba_attr, ba_a, ba_b, ba_seed);

        if (predict->parsed()) {
            BackendDescriptor d;
            auto kind = backend_kind_from_string(pr_backend);
            if (!kind.has_value()) throw ConfigError("unknown backend kind: " + pr_backend);
            d.kind = *kind;
            d.model_id = pr_model.empty() ? to_string(d.kind) : pr_model;
            d.endpoint = pr_endpoint;
            d.api_key_env = pr_key_env;
            d.max_retries = pr_retries;
            d.max_in_flight = pr_in_flight;
            d.oracle = pr_oracle;
            Corpus corpus = load_canonical_jsonl(pr_in);
            PredictionCache cache = pr_cache.empty() ? PredictionCache() : PredictionCache(pr_cache);
            PredictStats stats = predict_to_file(corpus, d, cache, pr_out);
            return stats.failures == 0 ? 0 : 1;
        }

        if (audit->parsed()) {
            if (!au_config.empty()) {
                PipelineConfig cfg = load_pipeline_config(au_config);
                std::ifstream cj(au_config);
                nlohmann::json cfg_json = nlohmann::json::parse(cj);
                run_config_pipeline(cfg, cfg_json, "audit", true, true, false);
                return 0;
            }
            if (au_in.empty() || au_preds.empty()) {
                throw ConfigError("audit needs either --config or both --in and --predictions");
            }
            AuditConfig c;
            auto attr = audit_attribute_from_string(au_attr);
            if (!attr.has_value()) throw ConfigError("unknown attribute: " + au_attr);
            c.attribute = *attr;
            c.groups = au_groups;
            if (c.groups.empty()) {
                c.groups = c.attribute == AuditAttribute::Dialect
                               ? std::vector<std::string>{"AAE", "SAE"}
                               : std::vector<std::string>{"Easy", "Medium", "Difficult",
                                                          "VeryDifficult"};
            }
            c.n_samples = au_samples;
            c.seed = au_seed;
            c.per_group_size = au_pgs;
            c.target = au_target;
            c.neutral_mode =
                au_drop_neutral ? NeutralFairnessMode::Drop : NeutralFairnessMode::NotPositive;
            Corpus corpus = load_canonical_jsonl(au_in);
            auto preds = load_predictions(au_preds);
            AuditResult result = run_audit(corpus, preds, c);
            fs::create_directories(au_out);
            fs::path rj = fs::path(au_out) / "result.json";
            write_audit_result(result, rj);
            std::vector<AuditResult> one{result};
            fs::path rc = fs::path(au_out) / "result.csv";
            {
                std::ofstream out(rc, std::ios::binary);
                out << render_fairness_long_csv(one);
            }
            nlohmann::json echo{{"in", au_in}, {"predictions", au_preds},
                                {"attribute", au_attr},  {"n_samples", au_samples},
                                {"seed", au_seed},       {"per_group_size", au_pgs}};
            write_manifest(au_out, "audit", config_digest(echo), au_seed, {au_in, au_preds},
                           {rj.string(), rc.string()});
            std::cerr << "audit complete: " << result.cells.size() << " metric cells -> " << au_out
                      << "\n";
            return 0;
        }

        if (report->parsed()) {
            std::vector<AuditResult> results;
            for (const std::string& p : re_in) results.push_back(load_audit_result(p));
            std::vector<MetricKind> metrics;
            for (const std::string& m : re_metrics) {
                if (m == "EO") metrics.push_back(MetricKind::EO);
                else if (m == "DI") metrics.push_back(MetricKind::DI);
                else if (m == "PP") metrics.push_back(MetricKind::PP);
                else throw ConfigError("unknown plot metric: " + m);
            }
            std::vector<std::string> outputs = emit_reports(results, re_out, metrics);
            nlohmann::json echo{{"in", re_in}, {"out", re_out}};
            write_manifest(re_out, "report", config_digest(echo), 0, re_in, outputs);
            std::cerr << "report complete: " << outputs.size() << " file(s) -> " << re_out << "\n";
            return 0;
        }

        if (all->parsed()) {
            PipelineConfig cfg = load_pipeline_config(all_config);
            std::ifstream cj(all_config);
            nlohmann::json cfg_json = nlohmann::json::parse(cj);
            run_config_pipeline(cfg, cfg_json, "all", true, true, true);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
