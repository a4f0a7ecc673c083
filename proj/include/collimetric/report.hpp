#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collimetric/baseline.hpp"
#include "collimetric/collision.hpp"

namespace collimetric {

inline constexpr std::string_view tool_version = "collimetric 0.1.0";

struct ReportExtras {
    /// Wall-clock evaluation time; omitted from the document when unset so
    /// reports stay byte-reproducible.
    std::optional<double> timing_ms;
};

/// JSON document with keys `tool`, `config`, `directions`, `pooled`
/// (and `timing_ms` when requested). Rates are fractions.
std::string report_json_text(const CollisionReport& report, const ReportExtras& extras = {});
void write_report_json(const CollisionReport& report, const std::filesystem::path& path,
                       const ReportExtras& extras = {});
/// Inverse of report_json_text. Throws ErrorKind::parse on schema mismatch.
CollisionReport parse_report_json(std::string_view text);

std::string sweep_json_text(const SweepSeries& series);
void write_sweep_json(const SweepSeries& series, const std::filesystem::path& path);

std::string baseline_json_text(const BaselineResult& result);

/// Colored PLY with one vertex per record that has a world point:
/// aligned black, FPC blue, FNC red.
void export_collision_map(const std::vector<PathRecord>& records,
                          const std::filesystem::path& path);
Rgb label_color(PathLabel label);

/// Header `i,j,direction_index,gt_depth,query_depth,matched_neighbor,label`;
/// misses leave the depth field empty.
std::string paths_csv_text(const std::vector<PathRecord>& records);
void write_paths_csv(const std::vector<PathRecord>& records, const std::filesystem::path& path);

enum class SweepMetric { r_fpc, r_fnc, fc };
SweepMetric parse_sweep_metric(std::string_view name);

/// Standalone SVG 1.1 line chart: t_z (mm) on X, metric in percent on Y.
/// Empty series is ErrorKind::invalid_argument.
std::string sweep_svg_text(const SweepSeries& series, SweepMetric metric);
void render_sweep_svg(const SweepSeries& series, SweepMetric metric,
                      const std::filesystem::path& path);

/// Writes `text` to `path`, ErrorKind::io on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace collimetric
