#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stancebias/audit.hpp"

namespace stancebias {

// One panel per model, groups on the x axis; the favor-direction series is
// drawn in green on the top strip and the against-direction series in red
// below it. Dot at the mean, whiskers at mean +/- sd, mean printed beside
// the dot. Results must share dataset/target/attribute/groups; throws
// PlotError listing any missing (model, group, direction) cell. Output
// bytes are deterministic for fixed input.
std::string render_metric_plot(const std::vector<AuditResult>& results, MetricKind metric);

std::string render_f1_table_csv(const std::vector<AuditResult>& results);
std::string render_neutral_table_csv(const std::vector<AuditResult>& results);
std::string render_mean_abs_eo_table_csv(const std::vector<AuditResult>& results);
std::string render_fairness_long_csv(const std::vector<AuditResult>& results);

// Writes the table families (f1.csv, neutral_rate.csv, mean_abs_eo.csv,
// fairness_long.csv, results.json) into dir; returns the written paths.
// Throws InputError when results is empty.
std::vector<std::filesystem::path> emit_tables(const std::vector<AuditResult>& results,
                                               const std::filesystem::path& dir);

// CSV numbers use fixed 4-decimal formatting; JSON keeps full precision.
std::string format_fixed4(double v);

} // namespace stancebias
