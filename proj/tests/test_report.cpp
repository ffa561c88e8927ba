#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stancebias/errors.hpp"
#include "stancebias/report.hpp"

using namespace stancebias;
namespace fs = std::filesystem;

namespace {

AuditCell cell(MetricKind metric, const std::string& group, PositiveLabel dir, double mean,
               double sd, int n_defined = 1000, int n_missing = 0) {
    AuditCell c;
    c.metric = metric;
    c.group = group;
    c.direction = dir;
    c.mean = mean;
    c.sd = sd;
    c.n_defined = n_defined;
    c.n_missing = n_missing;
    c.degenerate = n_missing * 2 > n_defined + n_missing;
    return c;
}

// Two models on one dataset with fixed numbers; the golden files pin the
// exact bytes these produce.
std::vector<AuditResult> fixture_results() {
    AuditResult a;
    a.model_id = "mock-alpha";
    a.dataset = "synth";
    a.target = "Topic";
    a.attribute = "dialect";
    a.groups = {"AAE", "SAE"};
    a.n_samples = 1000;
    a.per_group_size = 100;
    a.pool_size = 800;
    a.seed = 7;
    a.cells = {
        cell(MetricKind::EO, "AAE", PositiveLabel::Favor, 0.3, 0.05),
        cell(MetricKind::EO, "AAE", PositiveLabel::Against, -0.12, 0.04),
        cell(MetricKind::EO, "SAE", PositiveLabel::Favor, -0.3, 0.05),
        cell(MetricKind::EO, "SAE", PositiveLabel::Against, 0.12, 0.04),
        cell(MetricKind::DI, "AAE", PositiveLabel::Favor, 0.21, 0.03),
        cell(MetricKind::DI, "AAE", PositiveLabel::Against, -0.08, 0.02),
        cell(MetricKind::DI, "SAE", PositiveLabel::Favor, -0.21, 0.03),
        cell(MetricKind::DI, "SAE", PositiveLabel::Against, 0.08, 0.02),
        cell(MetricKind::PP, "AAE", PositiveLabel::Favor, 0.05, 0.01),
        cell(MetricKind::PP, "AAE", PositiveLabel::Against, -0.02, 0.01),
        cell(MetricKind::PP, "SAE", PositiveLabel::Favor, -0.05, 0.01),
        cell(MetricKind::PP, "SAE", PositiveLabel::Against, 0.02, 0.01),
    };
    a.overall.weighted_f1 = 0.8041;
    a.overall.neutral_rate = 12.5;
    a.overall.mean_abs_eo = 0.21;

    AuditResult b = a;
    b.model_id = "mock-beta";
    b.overall.weighted_f1 = 0.7117;
    b.overall.neutral_rate = 61.27;
    b.overall.mean_abs_eo = 0.07;
    for (AuditCell& c : b.cells) {
        c.mean *= 0.25;
        c.sd *= 0.5;
    }
    // beta's PP favor cells are mostly undefined
    b.cells[8] = cell(MetricKind::PP, "AAE", PositiveLabel::Favor, 0.0, 0.0, 200, 800);
    return {a, b};
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const fs::path kGoldenDir = fs::path(STANCEBIAS_TEST_DIR) / "golden";

// STANCEBIAS_REGEN_GOLDEN=1 rewrites the golden files instead of comparing.
void check_golden(const std::string& name, const std::string& actual) {
    if (std::getenv("STANCEBIAS_REGEN_GOLDEN") != nullptr) {
        fs::create_directories(kGoldenDir);
        std::ofstream out(kGoldenDir / name, std::ios::binary);
        out << actual;
        return;
    }
    CHECK_MESSAGE(actual == read_file(kGoldenDir / name), "golden mismatch: ", name);
}

} // namespace

TEST_CASE("table renderers are byte-stable against goldens") {
    std::vector<AuditResult> results = fixture_results();
    check_golden("f1.csv", render_f1_table_csv(results));
    check_golden("neutral_rate.csv", render_neutral_table_csv(results));
    check_golden("mean_abs_eo.csv", render_mean_abs_eo_table_csv(results));
    check_golden("fairness_long.csv", render_fairness_long_csv(results));
    check_golden("eo_plot.svg", render_metric_plot(results, MetricKind::EO));

    // identical input, identical bytes
    CHECK(render_fairness_long_csv(results) == render_fairness_long_csv(results));
    CHECK(render_metric_plot(results, MetricKind::EO) == render_metric_plot(results, MetricKind::EO));
}

TEST_CASE("table numbers are the audit values under 4-decimal formatting") {
    std::vector<AuditResult> results = fixture_results();
    std::string f1 = render_f1_table_csv(results);
    CHECK(f1.find("0.8041") != std::string::npos);
    CHECK(f1.find("0.7117") != std::string::npos);
    std::string fairness = render_fairness_long_csv(results);
    CHECK(fairness.find("0.3000") != std::string::npos);
    CHECK(fairness.find("-0.1200") != std::string::npos);
    CHECK(format_fixed4(0.3) == "0.3000");
    CHECK(format_fixed4(-0.123456) == "-0.1235");
}

TEST_CASE("plot encodes whiskers and omits them for sd 0") {
    std::vector<AuditResult> results = fixture_results();
    // zero out the sd of one cell: its whisker line disappears
    for (AuditCell& c : results[0].cells) c.sd = 0.0;
    std::string svg = render_metric_plot(results, MetricKind::EO);
    // alpha panel has no whisker lines, beta still does: count <line> minus
    // the two dashed zero axes per panel
    std::size_t lines = 0;
    for (std::size_t pos = svg.find("<line"); pos != std::string::npos;
         pos = svg.find("<line", pos + 1)) {
        ++lines;
    }
    // 2 panels x 2 zero axes + 4 beta whiskers (EO cells only)
    CHECK(lines == 8);
}

TEST_CASE("plot mean/whisker geometry matches mean +/- sd") {
    std::vector<AuditResult> results = {fixture_results()[0]};
    std::string svg = render_metric_plot(results, MetricKind::EO);
    // first cell: mean 0.3 sd 0.05 -> whisker endpoints at 0.25 and 0.35 in
    // value space; the strip maps value v to y = top + (1 - v) * 55
    CHECK(svg.find("0.30</text>") != std::string::npos);
    CHECK(svg.find("-0.12</text>") != std::string::npos);
}

TEST_CASE("plot refuses mixed panels and missing cells") {
    std::vector<AuditResult> results = fixture_results();
    results[1].dataset = "other";
    CHECK_THROWS_AS(render_metric_plot(results, MetricKind::EO), PlotError);

    results = fixture_results();
    results[0].cells.erase(results[0].cells.begin());  // drop EO/AAE/favor
    CHECK_THROWS_WITH_AS(render_metric_plot(results, MetricKind::EO),
                         doctest::Contains("mock-alpha/AAE/favor"), PlotError);

    CHECK_THROWS_AS(render_metric_plot({}, MetricKind::EO), PlotError);
}

TEST_CASE("emit_tables writes the full family and rejects empty input") {
    fs::path dir = fs::temp_directory_path() / "stancebias_report_test";
    fs::remove_all(dir);
    std::vector<fs::path> written = emit_tables(fixture_results(), dir);
    CHECK(written.size() == 5);
    for (const fs::path& p : written) CHECK(fs::exists(p));
    CHECK(fs::exists(dir / "results.json"));
    fs::remove_all(dir);

    CHECK_THROWS_AS(emit_tables({}, dir), InputError);
}
