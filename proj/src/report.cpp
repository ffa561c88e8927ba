#include "stancebias/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "stancebias/errors.hpp"

namespace stancebias {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<AuditResult> sorted_results(const std::vector<AuditResult>& results) {
    std::vector<AuditResult> out = results;
    std::sort(out.begin(), out.end(), [](const AuditResult& a, const AuditResult& b) {
        return std::tie(a.dataset, a.target, a.attribute, a.model_id) <
               std::tie(b.dataset, b.target, b.attribute, b.model_id);
    });
    return out;
}

std::vector<std::string> sorted_models(const std::vector<AuditResult>& results) {
    std::set<std::string> models;
    for (const AuditResult& r : results) models.insert(r.model_id);
    return {models.begin(), models.end()};
}

// dataset-by-model grid of an overall field; among several audits of the
// same pair the one covering the most records wins.
std::string grid_csv(const std::vector<AuditResult>& results, const char* value_name,
                     const std::function<std::optional<double>(const AuditResult&)>& field) {
    if (results.empty()) throw InputError("no audit results to tabulate");
    std::vector<std::string> models = sorted_models(results);
    std::set<std::string> datasets;
    for (const AuditResult& r : results) datasets.insert(r.dataset);

    std::map<std::pair<std::string, std::string>, const AuditResult*> best;
    for (const AuditResult& r : sorted_results(results)) {
        auto key = std::make_pair(r.dataset, r.model_id);
        auto it = best.find(key);
        if (it == best.end() || r.pool_size > it->second->pool_size) best[key] = &r;
    }

    std::ostringstream out;
    out << value_name;
    for (const auto& m : models) out << "," << csv_escape(m);
    out << "\n";
    for (const auto& d : datasets) {
        out << csv_escape(d);
        for (const auto& m : models) {
            out << ",";
            auto it = best.find({d, m});
            if (it != best.end()) {
                if (auto v = field(*it->second)) out << format_fixed4(*v);
            }
        }
        out << "\n";
    }
    return out.str();
}

} // namespace

std::string format_fixed4(double v) { return fmt("%.4f", v); }

std::string render_f1_table_csv(const std::vector<AuditResult>& results) {
    return grid_csv(results, "dataset",
                    [](const AuditResult& r) { return r.overall.weighted_f1; });
}

std::string render_neutral_table_csv(const std::vector<AuditResult>& results) {
    return grid_csv(results, "dataset", [](const AuditResult& r) {
        return std::optional<double>(r.overall.neutral_rate);
    });
}

std::string render_mean_abs_eo_table_csv(const std::vector<AuditResult>& results) {
    if (results.empty()) throw InputError("no audit results to tabulate");
    std::vector<std::string> models = sorted_models(results);
    std::set<std::string> attributes;
    for (const AuditResult& r : results) attributes.insert(r.attribute);

    // |EO| averaged over every EO cell of every matching audit: one value
    // per class, dataset and direction enters the mean.
    std::ostringstream out;
    out << "attribute";
    for (const auto& m : models) out << "," << csv_escape(m);
    out << "\n";
    for (const auto& attr : attributes) {
        out << csv_escape(attr);
        for (const auto& m : models) {
            double sum = 0.0;
            long n = 0;
            for (const AuditResult& r : sorted_results(results)) {
                if (r.attribute != attr || r.model_id != m) continue;
                for (const AuditCell& c : r.cells) {
                    if (c.metric == MetricKind::EO && c.n_defined > 0) {
                        sum += std::abs(c.mean);
                        ++n;
                    }
                }
            }
            out << ",";
            if (n > 0) out << format_fixed4(sum / static_cast<double>(n));
        }
        out << "\n";
    }
    return out.str();
}

std::string render_fairness_long_csv(const std::vector<AuditResult>& results) {
    if (results.empty()) throw InputError("no audit results to tabulate");
    std::ostringstream out;
    out << "dataset,target,attribute,model,metric,group,direction,mean,sd,n_defined,n_missing,degenerate\n";
    for (const AuditResult& r : sorted_results(results)) {
        for (const AuditCell& c : r.cells) {
            out << csv_escape(r.dataset) << "," << csv_escape(r.target) << ","
                << csv_escape(r.attribute) << "," << csv_escape(r.model_id) << ","
                << to_string(c.metric) << "," << csv_escape(c.group) << ","
                << to_string(c.direction) << "," << format_fixed4(c.mean) << ","
                << format_fixed4(c.sd) << "," << c.n_defined << "," << c.n_missing << ","
                << (c.degenerate ? "true" : "false") << "\n";
        }
    }
    return out.str();
}

namespace {

// Layout constants for the whisker panels.
constexpr double kStripHeight = 110.0;
constexpr double kTitleHeight = 24.0;
constexpr double kAxisHeight = 22.0;
constexpr double kGroupWidth = 64.0;
constexpr double kPanelPadding = 14.0;
constexpr double kLeftMargin = 42.0;

double strip_y(double value, double strip_top) {
    double v = std::clamp(value, -1.0, 1.0);
    return strip_top + (1.0 - v) * (kStripHeight / 2.0);
}

const AuditCell* find_cell(const AuditResult& r, MetricKind metric, const std::string& group,
                           PositiveLabel direction) {
    for (const AuditCell& c : r.cells) {
        if (c.metric == metric && c.group == group && c.direction == direction && c.n_defined > 0) {
            return &c;
        }
    }
    return nullptr;
}

} // namespace

std::string render_metric_plot(const std::vector<AuditResult>& results, MetricKind metric) {
    if (results.empty()) throw PlotError("no audit results to plot");
    std::vector<AuditResult> ordered = sorted_results(results);
    const AuditResult& first = ordered.front();
    for (const AuditResult& r : ordered) {
        if (r.dataset != first.dataset || r.target != first.target ||
            r.attribute != first.attribute || r.groups != first.groups) {
            throw PlotError("plot requires results for one dataset/target/attribute");
        }
    }

    std::vector<std::string> missing;
    for (const AuditResult& r : ordered) {
        for (const std::string& g : r.groups) {
            for (PositiveLabel d : {PositiveLabel::Favor, PositiveLabel::Against}) {
                if (find_cell(r, metric, g, d) == nullptr) {
                    missing.push_back(r.model_id + "/" + g + "/" + to_string(d));
                }
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing " + to_string(metric) + " cells:";
        for (const std::string& m : missing) msg += " " + m;
        throw PlotError(msg);
    }

    const auto n_groups = static_cast<double>(first.groups.size());
    const double panel_w = n_groups * kGroupWidth + kPanelPadding;
    const double panel_h = kTitleHeight + 2.0 * kStripHeight + kAxisHeight;
    const double width = kLeftMargin + panel_w * static_cast<double>(ordered.size()) + 10.0;
    const double height = panel_h + 30.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width)
        << "\" height=\"" << fmt("%.0f", height) << "\" viewBox=\"0 0 " << fmt("%.0f", width)
        << " " << fmt("%.0f", height) << "\">\n";
    svg << "<style>text{font-family:Helvetica,Arial,sans-serif;}</style>\n";
    svg << "<text x=\"" << fmt("%.1f", kLeftMargin) << "\" y=\"14\" font-size=\"12\">"
        << to_string(metric) << " - " << first.dataset << " / " << first.target << " / "
        << first.attribute << "</text>\n";

    const char* kFavorColor = "#2e8b57";
    const char* kAgainstColor = "#c0392b";

    for (std::size_t p = 0; p < ordered.size(); ++p) {
        const AuditResult& r = ordered[p];
        double x0 = kLeftMargin + panel_w * static_cast<double>(p);
        double top = 30.0 + kTitleHeight;
        svg << "<text x=\"" << fmt("%.1f", x0 + panel_w / 2.0) << "\" y=\""
            << fmt("%.1f", 30.0 + 14.0) << "\" font-size=\"11\" text-anchor=\"middle\">"
            << r.model_id << "</text>\n";

        for (int strip = 0; strip < 2; ++strip) {
            PositiveLabel direction = strip == 0 ? PositiveLabel::Favor : PositiveLabel::Against;
            const char* color = strip == 0 ? kFavorColor : kAgainstColor;
            double strip_top = top + kStripHeight * static_cast<double>(strip);
            double zero = strip_y(0.0, strip_top);
            svg << "<line x1=\"" << fmt("%.1f", x0) << "\" y1=\"" << fmt("%.1f", zero)
                << "\" x2=\"" << fmt("%.1f", x0 + panel_w - kPanelPadding) << "\" y2=\""
                << fmt("%.1f", zero) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3,3\"/>\n";
            if (p == 0) {
                svg << "<text x=\"4\" y=\"" << fmt("%.1f", zero + 3.0)
                    << "\" font-size=\"9\" fill=\"#666666\">0 (" << to_string(direction)
                    << ")</text>\n";
            }
            for (std::size_t g = 0; g < r.groups.size(); ++g) {
                const AuditCell* cell = find_cell(r, metric, r.groups[g], direction);
                double cx = x0 + kGroupWidth * (static_cast<double>(g) + 0.5);
                double cy = strip_y(cell->mean, strip_top);
                if (cell->sd > 0.0) {
                    double y1 = strip_y(cell->mean - cell->sd, strip_top);
                    double y2 = strip_y(cell->mean + cell->sd, strip_top);
                    svg << "<line x1=\"" << fmt("%.1f", cx) << "\" y1=\"" << fmt("%.1f", y1)
                        << "\" x2=\"" << fmt("%.1f", cx) << "\" y2=\"" << fmt("%.1f", y2)
                        << "\" stroke=\"" << color << "\" stroke-width=\"1.2\"/>\n";
                }
                svg << "<circle cx=\"" << fmt("%.1f", cx) << "\" cy=\"" << fmt("%.1f", cy)
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
                svg << "<text x=\"" << fmt("%.1f", cx + 5.0) << "\" y=\"" << fmt("%.1f", cy - 4.0)
                    << "\" font-size=\"9\" fill=\"" << color << "\">" << fmt("%.2f", cell->mean)
                    << "</text>\n";
            }
        }
        // group labels under the panel
        for (std::size_t g = 0; g < r.groups.size(); ++g) {
            double cx = x0 + kGroupWidth * (static_cast<double>(g) + 0.5);
            svg << "<text x=\"" << fmt("%.1f", cx) << "\" y=\""
                << fmt("%.1f", top + 2.0 * kStripHeight + 14.0)
                << "\" font-size=\"10\" text-anchor=\"middle\">" << r.groups[g] << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::filesystem::path> emit_tables(const std::vector<AuditResult>& results,
                                               const std::filesystem::path& dir) {
    if (results.empty()) throw InputError("no audit results to report");
    std::filesystem::create_directories(dir);
    auto write = [&](const std::filesystem::path& name, const std::string& content) {
        std::filesystem::path path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << content;
        if (!out) throw IoError("write failed: " + path.string());
        return path;
    };

    std::vector<std::filesystem::path> written;
    written.push_back(write("f1.csv", render_f1_table_csv(results)));
    written.push_back(write("neutral_rate.csv", render_neutral_table_csv(results)));
    written.push_back(write("mean_abs_eo.csv", render_mean_abs_eo_table_csv(results)));
    written.push_back(write("fairness_long.csv", render_fairness_long_csv(results)));

    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const AuditResult& r : sorted_results(results)) all.push_back(audit_result_to_json(r));
    written.push_back(write("results.json", all.dump(2) + "\n"));
    return written;
}

} // namespace stancebias
