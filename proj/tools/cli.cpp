#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "collimetric/baseline.hpp"
#include "collimetric/collision.hpp"
#include "collimetric/error.hpp"
#include "collimetric/point_io.hpp"
#include "collimetric/report.hpp"
#include "collimetric/scene.hpp"

namespace collimetric::cli {

namespace {

// Bad flag values detected after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

double to_number(const std::string& token, const std::string& flag) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) {
        throw UsageError(flag + ": invalid number '" + token + "'");
    }
    return value;
}

std::string shortest(double value) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

GripperSpec parse_gripper(const std::string& text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 3) {
        throw UsageError("--gripper: expected LxMxN in mm, got '" + text + "'");
    }
    GripperSpec g{to_number(parts[0], "--gripper"), to_number(parts[1], "--gripper"),
                  to_number(parts[2], "--gripper")};
    if (!(g.length > 0 && g.width > 0 && g.height > 0)) {
        throw UsageError("--gripper: dimensions must be > 0");
    }
    return g;
}

std::vector<Vec3> parse_directions(const std::string& text, bool z_up) {
    if (text == "1" || text == "4" || text == "7") {
        auto preset = direction_preset(std::stoi(text));
        return z_up ? mirror_z(std::move(preset)) : preset;
    }
    std::vector<Vec3> out;
    for (const std::string& item : split(text, ';')) {
        if (item.empty()) {
            continue;
        }
        const auto c = split(item, ',');
        if (c.size() != 3) {
            throw UsageError("--directions: expected a preset 1|4|7 or 'x,y,z;...', got '" + text + "'");
        }
        const Vec3 v{to_number(c[0], "--directions"), to_number(c[1], "--directions"),
                     to_number(c[2], "--directions")};
        if (!(norm(v) > 1e-9)) {
            throw UsageError("--directions: zero vector");
        }
        out.push_back((1.0 / norm(v)) * v);
    }
    if (out.empty()) {
        throw UsageError("--directions: no directions given");
    }
    return out;
}

std::vector<double> parse_tz_list(const std::string& text) {
    std::vector<double> values;
    for (const std::string& item : split(text, ',')) {
        values.push_back(to_number(item, "--tz-list"));
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < 0.0) {
            throw UsageError("--tz-list: values must be >= 0");
        }
        if (k > 0 && !(values[k] > values[k - 1])) {
            throw UsageError("--tz-list: values must be strictly increasing");
        }
    }
    return values;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
    return buf;
}

unsigned thread_count(int flag) {
    if (flag > 0) {
        return static_cast<unsigned>(flag);
    }
    if (flag < 0) {
        throw UsageError("--threads must be >= 0");
    }
    if (const char* env = std::getenv("COLLIMETRIC_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 0) {
            throw UsageError(std::string("COLLIMETRIC_THREADS: invalid value '") + env + "'");
        }
        return static_cast<unsigned>(n);
    }
    return 0;
}

// Flags shared by every subcommand that reads a ground-truth/query pair.
struct InputFlags {
    std::string gt_path;
    std::string query_path;
    std::string format = "auto";
    double unit_scale = 1.0;
    int threads = 0;

    void attach(CLI::App& app) {
        app.add_option("gt", gt_path, "Ground-truth point cloud (PLY, XYZ or CSV)")->required();
        app.add_option("query", query_path, "Query point cloud under evaluation")->required();
        app.add_option("--format", format, "Input format: auto|ply-ascii|ply-binary-le|xyz|csv")
            ->capture_default_str();
        app.add_option("--unit-scale", unit_scale,
                       "Multiplier converting file coordinates to millimeters")
            ->capture_default_str();
        app.add_option("--threads", threads,
                       "Worker threads (0 = all cores; falls back to COLLIMETRIC_THREADS)")
            ->capture_default_str();
    }

    std::pair<PointCloud, PointCloud> load(std::ostream& err) const {
        if (!(unit_scale > 0.0)) {
            throw UsageError("--unit-scale must be > 0");
        }
        LoadOptions options;
        try {
            options.format = parse_cloud_format(format);
        } catch (const Error& e) {
            throw UsageError(std::string("--format: ") + e.what());
        }
        options.unit_scale = unit_scale;
        std::vector<std::string> warnings;
        PointCloud gt = load_point_cloud(gt_path, options, &warnings);
        PointCloud query = load_point_cloud(query_path, options, &warnings);
        for (const std::string& w : warnings) {
            err << "warning: " << w << '\n';
        }
        return {std::move(gt), std::move(query)};
    }

    Parallelism parallelism() const { return {thread_count(threads)}; }
};

struct ConfigFlags {
    double tz = 10.0;
    std::string gripper = "10x10x10";
    double step = 5.0;
    int n_gt = 15;
    int n_q = 5;
    std::string directions = "1";
    bool z_up = false;

    void attach(CLI::App& app, bool with_tz) {
        if (with_tz) {
            app.add_option("--tz", tz, "Z tolerance T_Z along the motion direction [mm]")
                ->capture_default_str();
        }
        app.add_option("--gripper", gripper,
                       "Gripper size LxMxN [mm]: cross-section L x M, height N along the motion")
            ->capture_default_str();
        app.add_option("--step", step, "Path grid step G_step, also the XY tolerance [mm]")
            ->capture_default_str();
        app.add_option("--n-gt", n_gt,
                       "Ground-truth outlier threshold: collision needs more than this many "
                       "points inside the gripper [points]")
            ->capture_default_str();
        app.add_option("--n-q", n_q, "Query outlier threshold [points]")->capture_default_str();
        app.add_option("--directions", directions,
                       "Preset 1|4|7 or explicit unit-free vectors 'x,y,z;x,y,z' (normalized)")
            ->capture_default_str();
        app.add_flag("--z-up", z_up,
                     "Clouds are z-up (e.g. synth scenes): presets move along -Z instead of +Z");
    }

    EvalConfig build() const {
        EvalConfig config;
        config.t_z = tz;
        config.gripper = parse_gripper(gripper);
        config.g_step = step;
        if (n_gt < 0 || n_q < 0) {
            throw UsageError("--n-gt and --n-q must be >= 0");
        }
        config.n_gt = static_cast<std::size_t>(n_gt);
        config.n_q = static_cast<std::size_t>(n_q);
        config.directions = parse_directions(directions, z_up);
        try {
            config.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return config;
    }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCommand {
    InputFlags input;
    ConfigFlags config;
    std::string out_json, out_map, out_csv;
    bool timing = false;

    void attach(CLI::App& app) {
        input.attach(app);
        config.attach(app, true);
        app.add_option("--out-json", out_json, "Write the JSON report here");
        app.add_option("--out-map", out_map,
                       "Write a colored PLY collision map (black aligned, blue FPC, red FNC)");
        app.add_option("--out-csv", out_csv, "Write one CSV row per path");
        app.add_flag("--timing", timing, "Include wall-clock timing [ms] in the JSON report");
    }

    int run(std::ostream& out, std::ostream& err) const {
        const EvalConfig cfg = config.build();
        const Parallelism par = input.parallelism();
        const auto [gt, query] = input.load(err);
        const auto start = std::chrono::steady_clock::now();
        const Evaluation evaluation = evaluate_with_records(gt, query, cfg, par);
        const double elapsed = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        if (!out_json.empty()) {
            ReportExtras extras;
            if (timing) {
                extras.timing_ms = elapsed;
            }
            write_report_json(evaluation.report, out_json, extras);
        }
        if (!out_map.empty()) {
            export_collision_map(evaluation.records, out_map);
        }
        if (!out_csv.empty()) {
            write_paths_csv(evaluation.records, out_csv);
        }
        const CollisionReport& r = evaluation.report;
        out << "R_FPC=" << percent(r.r_fpc()) << " R_FNC=" << percent(r.r_fnc())
            << " FC=" << percent(r.fc()) << '\n';
        return exit_ok;
    }
};

// ---------------------------------------------------------------- baseline

struct BaselineCommand {
    InputFlags input;
    double d = 10.0;
    std::string hausdorff = "sum";
    bool emd = false;
    std::size_t emd_cap = default_emd_cap;
    std::string out_json;

    void attach(CLI::App& app) {
        input.attach(app);
        app.add_option("--d", d, "Distance threshold for precision/recall/F-score [mm]")
            ->capture_default_str();
        app.add_option("--hausdorff", hausdorff,
                       "Combine one-sided Hausdorff distances by 'sum' or 'max'")
            ->capture_default_str();
        app.add_flag("--emd", emd, "Also compute the exact Earth Mover's Distance [mm] "
                                   "(equal-size clouds only)");
        app.add_option("--emd-cap", emd_cap, "Largest cloud size for the exact EMD solve [points]")
            ->capture_default_str();
        app.add_option("--out-json", out_json, "Write the metrics as JSON here");
    }

    int run(std::ostream& out, std::ostream& err) const {
        BaselineOptions options;
        if (!(d > 0.0)) {
            throw UsageError("--d must be > 0");
        }
        options.threshold_d = d;
        if (hausdorff == "sum") {
            options.hausdorff_variant = HausdorffVariant::sum;
        } else if (hausdorff == "max") {
            options.hausdorff_variant = HausdorffVariant::max;
        } else {
            throw UsageError("--hausdorff must be 'sum' or 'max'");
        }
        options.with_emd = emd;
        options.emd_cap = emd_cap;
        const Parallelism par = input.parallelism();
        const auto [gt, query] = input.load(err);
        const BaselineResult result = compute_baselines(gt, query, options, par);
        if (!out_json.empty()) {
            write_text_file(out_json, baseline_json_text(result));
        }
        char line[128];
        std::snprintf(line, sizeof line, "%-22s %.6g\n", "chamfer [mm^2]", result.chamfer);
        out << line;
        std::snprintf(line, sizeof line, "%-22s %.6g\n",
                      hausdorff == "sum" ? "hausdorff sum [mm]" : "hausdorff max [mm]",
                      result.hausdorff);
        out << line;
        std::snprintf(line, sizeof line, "%-22s %.2f\n", "accuracy [%]", 100.0 * result.precision);
        out << line;
        std::snprintf(line, sizeof line, "%-22s %.2f\n", "completeness [%]", 100.0 * result.recall);
        out << line;
        std::snprintf(line, sizeof line, "%-22s %.2f\n", "f-score [%]", 100.0 * result.fscore);
        out << line;
        if (result.emd) {
            std::snprintf(line, sizeof line, "%-22s %.6g\n", "emd [mm]", *result.emd);
            out << line;
        }
        return exit_ok;
    }
};

// ---------------------------------------------------------------- sweep

struct SweepCommand {
    InputFlags input;
    ConfigFlags config;
    std::string tz_list = "2.5,5,7.5,10,12.5,15,17.5,20";
    std::string metric = "r_fpc";
    std::string out_svg, out_json;

    void attach(CLI::App& app) {
        input.attach(app);
        config.attach(app, false);
        app.add_option("--tz-list", tz_list,
                       "Comma-separated, strictly increasing Z tolerances [mm]")
            ->capture_default_str();
        app.add_option("--metric", metric, "Metric charted in the SVG: r_fpc|r_fnc|fc")
            ->capture_default_str();
        app.add_option("--out-svg", out_svg, "Write an SVG chart of the metric [%] over T_Z [mm]");
        app.add_option("--out-json", out_json, "Write the whole series as JSON");
    }

    int run(std::ostream& out, std::ostream& err) const {
        const std::vector<double> tz = parse_tz_list(tz_list);
        SweepMetric chart_metric;
        try {
            chart_metric = parse_sweep_metric(metric);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        const EvalConfig cfg = config.build();
        const Parallelism par = input.parallelism();
        const auto [gt, query] = input.load(err);
        const SweepSeries series = tolerance_sweep(gt, query, cfg, tz, par);
        if (!out_svg.empty()) {
            render_sweep_svg(series, chart_metric, out_svg);
        }
        if (!out_json.empty()) {
            write_sweep_json(series, out_json);
        }
        for (const SweepPoint& p : series) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "T_Z=%gmm", p.t_z);
            out << buf << " R_FPC=" << percent(p.report.r_fpc())
                << " R_FNC=" << percent(p.report.r_fnc()) << " FC=" << percent(p.report.fc())
                << '\n';
        }
        return exit_ok;
    }
};

// ---------------------------------------------------------------- synth

struct SynthCommand {
    std::string spec_path;
    std::string out_path;
    std::string format = "auto";
    std::string save_spec;
    std::optional<std::string> extent;
    std::optional<double> spacing;
    std::optional<std::uint64_t> seed;
    bool no_plane = false;
    std::vector<std::string> boxes, rods, holes, ghosts;
    std::optional<double> keep;
    std::optional<double> noise;

    void attach(CLI::App& app) {
        app.add_option("--spec", spec_path, "Scene description file ('key = value' lines)");
        app.add_option("-o,--out", out_path, "Output point cloud path")->required();
        app.add_option("--format", format,
                       "Output format: auto (by extension)|ply-ascii|ply-binary-le|xyz|csv")
            ->capture_default_str();
        app.add_option("--save-spec", save_spec, "Also write the effective scene description here");
        app.add_option("--extent", extent, "Ground plane size WxH [mm]");
        app.add_option("--spacing", spacing, "Lattice spacing of every surface [mm]");
        app.add_option("--seed", seed, "Seed for ghost blobs, thinning and noise");
        app.add_flag("--no-plane", no_plane, "Omit the ground plane");
        app.add_option("--box", boxes, "Box cx,cy,cz,sx,sy,sz [mm]; repeatable");
        app.add_option("--rod", rods, "Vertical rod bx,by,bz,diameter,height [mm]; repeatable");
        app.add_option("--hole", holes, "Hole x,y,radius [mm] punched through everything; repeatable");
        app.add_option("--ghost", ghosts,
                       "Ghost blob cx,cy,cz,size [mm],count [points]; repeatable");
        app.add_option("--keep", keep, "Random thinning: fraction of points kept, in (0, 1]");
        app.add_option("--noise", noise, "Gaussian noise sigma per coordinate [mm]");
    }

    std::string spec_text() const {
        std::string text;
        if (!spec_path.empty()) {
            std::ifstream in(spec_path);
            if (!in) {
                throw Error(ErrorKind::io, "cannot open scene spec '" + spec_path + "'");
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
            if (!text.empty() && text.back() != '\n') {
                text += '\n';
            }
        }
        if (extent) {
            const auto parts = split(*extent, 'x');
            if (parts.size() != 2) {
                throw UsageError("--extent: expected WxH in mm, got '" + *extent + "'");
            }
            text += "extent = " + parts[0] + " " + parts[1] + "\n";
        }
        if (spacing) text += "spacing = " + shortest(*spacing) + "\n";
        if (seed) text += "seed = " + std::to_string(*seed) + "\n";
        if (no_plane) text += "plane = false\n";
        for (const auto& b : boxes) text += "box = " + b + "\n";
        for (const auto& r : rods) text += "rod = " + r + "\n";
        for (const auto& h : holes) text += "hole = " + h + "\n";
        for (const auto& g : ghosts) text += "ghost = " + g + "\n";
        if (keep) text += "keep = " + shortest(*keep) + "\n";
        if (noise) text += "noise = " + shortest(*noise) + "\n";
        return text;
    }

    int run(std::ostream& out, std::ostream&) const {
        SceneSpec spec;
        try {
            spec = parse_scene_spec(spec_text());
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::parse) {
                throw UsageError(e.what());
            }
            throw;
        }
        CloudFormat fmt;
        try {
            fmt = parse_cloud_format(format);
        } catch (const Error& e) {
            throw UsageError(std::string("--format: ") + e.what());
        }
        PointCloud cloud;
        try {
            cloud = generate_scene(spec);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::invalid_argument) {
                throw UsageError(e.what());
            }
            throw;
        }
        save_point_cloud(cloud, out_path, fmt == CloudFormat::automatic ? format_for_path(out_path) : fmt);
        if (!save_spec.empty()) {
            write_text_file(save_spec, format_scene_spec(spec));
        }
        out << "wrote " << cloud.size() << " points to " << out_path << '\n';
        return exit_ok;
    }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collision-avoidance evaluation of point clouds against a ground truth. "
                 "All lengths are millimeters."};
    app.name(args.empty() ? "collimetric" : std::filesystem::path(args[0]).filename().string());
    app.require_subcommand(1);

    EvaluateCommand evaluate_cmd;
    BaselineCommand baseline_cmd;
    SweepCommand sweep_cmd;
    SynthCommand synth_cmd;
    CLI::App* evaluate_app = app.add_subcommand(
        "evaluate", "Simulate gripper descents and report FPC/FNC rates and the collision F-score");
    CLI::App* baseline_app = app.add_subcommand(
        "baseline", "Chamfer, Hausdorff, accuracy/completeness/F-score and optional EMD");
    CLI::App* sweep_app = app.add_subcommand(
        "sweep", "Evaluate over a list of Z tolerances (paths simulated once, relabeled per T_Z)");
    CLI::App* synth_app = app.add_subcommand("synth", "Generate a deterministic synthetic scene");
    evaluate_cmd.attach(*evaluate_app);
    baseline_cmd.attach(*baseline_app);
    sweep_cmd.attach(*sweep_app);
    synth_cmd.attach(*synth_app);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (evaluate_app->parsed()) return evaluate_cmd.run(out, err);
        if (baseline_app->parsed()) return baseline_cmd.run(out, err);
        if (sweep_app->parsed()) return sweep_cmd.run(out, err);
        if (synth_app->parsed()) return synth_cmd.run(out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

} // namespace collimetric::cli
