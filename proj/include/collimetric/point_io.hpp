#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "collimetric/geometry.hpp"

namespace collimetric {

enum class CloudFormat { ply_ascii, ply_binary_le, xyz, csv, automatic };

/// Accepts "ply-ascii", "ply-binary-le", "xyz", "csv", "auto".
CloudFormat parse_cloud_format(std::string_view name);

/// Picks a concrete format for writing from the file extension
/// (.ply -> binary little-endian, .csv -> csv, anything else -> xyz).
CloudFormat format_for_path(const std::filesystem::path& path);

struct LoadOptions {
    CloudFormat format = CloudFormat::automatic;
    /// Multiplies every coordinate at load; files carry no unit metadata.
    double unit_scale = 1.0;
};

/// Loads a point cloud. Errors: ErrorKind::io, ErrorKind::parse (with line or
/// byte offset), ErrorKind::non_finite (naming the zero-based record index).
/// Ignored PLY properties are reported through `warnings` when non-null.
PointCloud load_point_cloud(const std::filesystem::path& path, const LoadOptions& options = {},
                            std::vector<std::string>* warnings = nullptr);

/// ASCII formats use shortest round-trip decimal formatting; binary PLY
/// stores float64 so reloads are bit-identical. Colors are written when present.
void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                      CloudFormat format);

} // namespace collimetric
