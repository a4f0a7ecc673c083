#include "collimetric/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "collimetric/error.hpp"
#include "collimetric/point_io.hpp"

namespace collimetric {

namespace {

using Json = nlohmann::ordered_json;

std::string general(double value, int precision) {
    std::array<char, 64> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, precision);
    return std::string(buf.data(), r.ptr);
}

// Millimeter quantities carry 9 significant digits.
double mm(double value) {
    const std::string text = general(value, 9);
    double rounded = value;
    std::from_chars(text.data(), text.data() + text.size(), rounded);
    return rounded;
}

Json vec_json(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const Json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorKind::parse, "report: direction must be a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json config_json(const EvalConfig& config) {
    Json directions = Json::array();
    for (const Vec3& d : config.directions) {
        directions.push_back(vec_json(d));
    }
    return Json{
        {"t_z", mm(config.t_z)},
        {"gripper",
         {{"length", mm(config.gripper.length)},
          {"width", mm(config.gripper.width)},
          {"height", mm(config.gripper.height)}}},
        {"g_step", mm(config.g_step)},
        {"n_gt", config.n_gt},
        {"n_q", config.n_q},
        {"directions", directions},
    };
}

EvalConfig config_from(const Json& j) {
    EvalConfig config;
    config.t_z = j.at("t_z").get<double>();
    config.gripper.length = j.at("gripper").at("length").get<double>();
    config.gripper.width = j.at("gripper").at("width").get<double>();
    config.gripper.height = j.at("gripper").at("height").get<double>();
    config.g_step = j.at("g_step").get<double>();
    config.n_gt = j.at("n_gt").get<std::size_t>();
    config.n_q = j.at("n_q").get<std::size_t>();
    config.directions.clear();
    for (const Json& d : j.at("directions")) {
        config.directions.push_back(vec_from(d));
    }
    return config;
}

void put_counts(Json& out, const LabelCounts& counts) {
    out["r_fpc"] = counts.r_fpc();
    out["r_fnc"] = counts.r_fnc();
    out["fc"] = counts.fc();
    out["n_total"] = counts.n_total;
    out["n_fpc"] = counts.n_fpc;
    out["n_fnc"] = counts.n_fnc;
    out["n_aligned"] = counts.n_aligned;
}

LabelCounts counts_from(const Json& j) {
    LabelCounts c;
    c.n_total = j.at("n_total").get<std::size_t>();
    c.n_fpc = j.at("n_fpc").get<std::size_t>();
    c.n_fnc = j.at("n_fnc").get<std::size_t>();
    c.n_aligned = j.at("n_aligned").get<std::size_t>();
    return c;
}

Json directions_json(const std::vector<DirectionReport>& reports) {
    Json out = Json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const DirectionReport& r = reports[k];
        Json entry{{"index", k}, {"direction", vec_json(r.direction)},
                   {"grid", {{"cols", r.cols}, {"rows", r.rows}}}};
        put_counts(entry, r.counts);
        out.push_back(std::move(entry));
    }
    return out;
}

Json pooled_json(const LabelCounts& counts) {
    Json pooled = Json::object();
    put_counts(pooled, counts);
    return pooled;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
    }
}

std::string report_json_text(const CollisionReport& report, const ReportExtras& extras) {
    Json doc{
        {"tool", tool_version},
        {"config", config_json(report.config)},
        {"directions", directions_json(report.directions)},
        {"pooled", pooled_json(report.pooled)},
    };
    if (extras.timing_ms) {
        doc["timing_ms"] = std::round(*extras.timing_ms * 1000.0) / 1000.0;
    }
    return dump(doc);
}

void write_report_json(const CollisionReport& report, const std::filesystem::path& path,
                       const ReportExtras& extras) {
    write_text_file(path, report_json_text(report, extras));
}

CollisionReport parse_report_json(std::string_view text) {
    try {
        const Json doc = Json::parse(text);
        CollisionReport report;
        report.config = config_from(doc.at("config"));
        for (const Json& d : doc.at("directions")) {
            DirectionReport r;
            r.direction = vec_from(d.at("direction"));
            r.cols = d.at("grid").at("cols").get<std::size_t>();
            r.rows = d.at("grid").at("rows").get<std::size_t>();
            r.counts = counts_from(d);
            report.directions.push_back(r);
        }
        report.pooled = counts_from(doc.at("pooled"));
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("report JSON: ") + e.what());
    }
}

std::string sweep_json_text(const SweepSeries& series) {
    Json points = Json::array();
    for (const SweepPoint& p : series) {
        points.push_back(Json{{"t_z", mm(p.t_z)},
                              {"pooled", pooled_json(p.report.pooled)},
                              {"directions", directions_json(p.report.directions)}});
    }
    Json doc{{"tool", tool_version}};
    if (!series.empty()) {
        doc["config"] = config_json(series.front().report.config);
        doc["config"].erase("t_z");
    }
    doc["series"] = points;
    return dump(doc);
}

void write_sweep_json(const SweepSeries& series, const std::filesystem::path& path) {
    write_text_file(path, sweep_json_text(series));
}

std::string baseline_json_text(const BaselineResult& result) {
    Json doc{
        {"tool", tool_version},
        {"threshold_d", mm(result.threshold_d)},
        {"chamfer", mm(result.chamfer)},
        {"hausdorff", mm(result.hausdorff)},
        {"hausdorff_variant", result.hausdorff_variant == HausdorffVariant::sum ? "sum" : "max"},
        {"precision", result.precision},
        {"recall", result.recall},
        {"fscore", result.fscore},
    };
    if (result.emd) {
        doc["emd"] = mm(*result.emd);
    }
    return dump(doc);
}

Rgb label_color(PathLabel label) {
    switch (label) {
    case PathLabel::aligned: return {0, 0, 0};
    case PathLabel::fpc: return {0, 0, 255};
    case PathLabel::fnc: return {255, 0, 0};
    }
    return {};
}

void export_collision_map(const std::vector<PathRecord>& records,
                          const std::filesystem::path& path) {
    PointCloud map;
    for (const PathRecord& r : records) {
        if (r.world_point) {
            map.points.push_back(*r.world_point);
            map.colors.push_back(label_color(r.label));
        }
    }
    save_point_cloud(map, path, CloudFormat::ply_binary_le);
}

std::string paths_csv_text(const std::vector<PathRecord>& records) {
    std::string out = "i,j,direction_index,gt_depth,query_depth,matched_neighbor,label\n";
    const auto depth = [](const PathOutcome& o) {
        return o.depth ? general(*o.depth, 9) : std::string();
    };
    for (const PathRecord& r : records) {
        out += std::to_string(r.i) + ',' + std::to_string(r.j) + ',' +
               std::to_string(r.direction_index) + ',' + depth(r.gt) + ',' + depth(r.query_used) +
               ',' + to_string(r.matched) + ',' + to_string(r.label) + '\n';
    }
    return out;
}

void write_paths_csv(const std::vector<PathRecord>& records, const std::filesystem::path& path) {
    write_text_file(path, paths_csv_text(records));
}

SweepMetric parse_sweep_metric(std::string_view name) {
    if (name == "r_fpc") return SweepMetric::r_fpc;
    if (name == "r_fnc") return SweepMetric::r_fnc;
    if (name == "fc") return SweepMetric::fc;
    throw Error(ErrorKind::invalid_argument,
                "unknown sweep metric '" + std::string(name) + "' (r_fpc, r_fnc, fc)");
}

std::string sweep_svg_text(const SweepSeries& series, SweepMetric metric) {
    if (series.empty()) {
        throw Error(ErrorKind::invalid_argument, "sweep chart: series is empty");
    }
    const auto value_of = [metric](const CollisionReport& r) {
        switch (metric) {
        case SweepMetric::r_fpc: return 100.0 * r.r_fpc();
        case SweepMetric::r_fnc: return 100.0 * r.r_fnc();
        case SweepMetric::fc: return 100.0 * r.fc();
        }
        return 0.0;
    };
    const char* name = metric == SweepMetric::r_fpc   ? "R_FPC"
                       : metric == SweepMetric::r_fnc ? "R_FNC"
                                                      : "FC";

    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_lo = series.front().t_z;
    double x_hi = series.back().t_z;
    if (x_hi <= x_lo) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    double y_hi = 0.0;
    for (const SweepPoint& p : series) {
        y_hi = std::max(y_hi, value_of(p.report));
    }
    // Round the top of the Y axis up to a 1-2-5 step; an all-zero series spans 0..1 %.
    double y_step = 0.2;
    if (y_hi > 0.0) {
        const double raw = y_hi / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double norm_raw = raw / mag;
        y_step = (norm_raw <= 1.0 ? 1.0 : norm_raw <= 2.0 ? 2.0 : norm_raw <= 5.0 ? 5.0 : 10.0) * mag;
    }
    const double y_top = std::max(y_step * std::ceil(y_hi / y_step - 1e-12), y_step * 5.0);

    const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto py = [&](double y) { return top + plot_h - y / y_top * plot_h; };
    const auto f = [](double v) { return general(v, 6); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << f(width)
        << "\" height=\"" << f(height) << "\" viewBox=\"0 0 " << f(width) << ' ' << f(height)
        << "\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"" << f(width) << "\" height=\"" << f(height)
        << "\" fill=\"white\"/>\n"
        << "  <text x=\"" << f(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << name
        << " vs Z tolerance</text>\n";

    svg << "  <g id=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double y = 0.0; y <= y_top + 1e-9; y += y_step) {
        svg << "    <line x1=\"" << f(left) << "\" y1=\"" << f(py(y)) << "\" x2=\""
            << f(left + plot_w) << "\" y2=\"" << f(py(y)) << "\"/>\n";
    }
    svg << "  </g>\n";

    svg << "  <g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
        << "    <line x1=\"" << f(left) << "\" y1=\"" << f(top + plot_h) << "\" x2=\""
        << f(left + plot_w) << "\" y2=\"" << f(top + plot_h) << "\"/>\n"
        << "    <line x1=\"" << f(left) << "\" y1=\"" << f(top) << "\" x2=\"" << f(left)
        << "\" y2=\"" << f(top + plot_h) << "\"/>\n"
        << "  </g>\n";

    svg << "  <g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (const SweepPoint& p : series) {
        svg << "    <text x=\"" << f(px(p.t_z)) << "\" y=\"" << f(top + plot_h + 16)
            << "\" text-anchor=\"middle\">" << f(p.t_z) << "</text>\n";
    }
    for (double y = 0.0; y <= y_top + 1e-9; y += y_step) {
        svg << "    <text x=\"" << f(left - 6) << "\" y=\"" << f(py(y) + 4)
            << "\" text-anchor=\"end\">" << f(y) << "</text>\n";
    }
    svg << "  </g>\n";

    svg << "  <text x=\"" << f(left + plot_w / 2) << "\" y=\"" << f(height - 14)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << "Z tolerance T_Z [mm]</text>\n"
        << "  <text x=\"18\" y=\"" << f(top + plot_h / 2) << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
        << f(top + plot_h / 2) << ")\">" << name << " [%]</text>\n";

    svg << "  <polyline id=\"series\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < series.size(); ++k) {
        svg << (k ? " " : "") << f(px(series[k].t_z)) << ',' << f(py(value_of(series[k].report)));
    }
    svg << "\"/>\n";
    svg << "  <g id=\"markers\" fill=\"#1f77b4\">\n";
    for (const SweepPoint& p : series) {
        svg << "    <circle class=\"marker\" cx=\"" << f(px(p.t_z)) << "\" cy=\""
            << f(py(value_of(p.report))) << "\" r=\"4\"><title>T_Z " << f(p.t_z) << " mm: "
            << general(value_of(p.report), 4) << " %</title></circle>\n";
    }
    svg << "  </g>\n</svg>\n";
    return svg.str();
}

void render_sweep_svg(const SweepSeries& series, SweepMetric metric,
                      const std::filesystem::path& path) {
    write_text_file(path, sweep_svg_text(series, metric));
}

} // namespace collimetric
