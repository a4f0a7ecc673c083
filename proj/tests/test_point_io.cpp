#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "collimetric/error.hpp"
#include "collimetric/point_io.hpp"
#include "collimetric/random.hpp"
#include "oracles.hpp"

using namespace collimetric;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = testutil::tmp_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

ErrorKind load_error(const fs::path& p, const LoadOptions& options = {}, std::string* message = nullptr) {
    try {
        load_point_cloud(p, options);
    } catch (const Error& e) {
        if (message != nullptr) *message = e.what();
        return e.kind();
    }
    FAIL("expected a load error for " << p.string());
    return ErrorKind::io;
}

PointCloud random_cloud(std::uint64_t seed, std::size_t n, bool colors) {
    Rng rng(seed);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        c.points.push_back({rng.uniform(-1000, 1000), rng.uniform(-1000, 1000), rng.uniform(-1e-3, 1e-3)});
        if (colors) {
            c.colors.push_back({static_cast<std::uint8_t>(rng.next()), static_cast<std::uint8_t>(rng.next()),
                                static_cast<std::uint8_t>(rng.next())});
        }
    }
    return c;
}

bool bit_identical(const PointCloud& a, const PointCloud& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.points.data(), b.points.data(), a.size() * sizeof(Point3)) == 0;
}

} // namespace

TEST_CASE("xyz: three lines in file order") {
    const fs::path p = write_temp("three.xyz", "0 0 0\n1 0 0\n0 2 0\n");
    const PointCloud c = load_point_cloud(p);
    REQUIRE(c.size() == 3);
    CHECK(c.points[0] == Vec3{0, 0, 0});
    CHECK(c.points[1] == Vec3{1, 0, 0});
    CHECK(c.points[2] == Vec3{0, 2, 0});
}

TEST_CASE("xyz: empty file gives an empty cloud") {
    const fs::path p = write_temp("empty.xyz", "");
    CHECK(load_point_cloud(p).empty());
}

TEST_CASE("xyz: comments, blank lines, tabs and extra columns") {
    const fs::path p = write_temp("comments.xyz", "# header\n\n1\t2\t3  9 9\n  4 5 6 # trailing\n");
    const PointCloud c = load_point_cloud(p);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0] == Vec3{1, 2, 3});
    CHECK(c.points[1] == Vec3{4, 5, 6});
}

TEST_CASE("xyz: nan is rejected naming record 0") {
    const fs::path p = write_temp("nan.xyz", "1 nan 0\n");
    std::string msg;
    CHECK(load_error(p, {}, &msg) == ErrorKind::non_finite);
    CHECK(msg.find("record 0") != std::string::npos);
}

TEST_CASE("xyz: inf at a later record is named") {
    const fs::path p = write_temp("inf.xyz", "0 0 0\n# skip\n1 1 inf\n");
    std::string msg;
    CHECK(load_error(p, {}, &msg) == ErrorKind::non_finite);
    CHECK(msg.find("record 1") != std::string::npos);
}

TEST_CASE("xyz: malformed numbers report the line") {
    const fs::path p = write_temp("bad.xyz", "0 0 0\n1 x 2\n");
    std::string msg;
    CHECK(load_error(p, {}, &msg) == ErrorKind::parse);
    CHECK(msg.find("line 2") != std::string::npos);
    const fs::path q = write_temp("short.xyz", "1 2\n");
    CHECK(load_error(q) == ErrorKind::parse);
}

TEST_CASE("missing file is an io error naming the path") {
    const fs::path p = testutil::tmp_dir() / "does_not_exist.xyz";
    std::string msg;
    CHECK(load_error(p, {}, &msg) == ErrorKind::io);
    CHECK(msg.find("does_not_exist.xyz") != std::string::npos);
}

TEST_CASE("csv: with and without header") {
    const fs::path a = write_temp("with_header.csv", "x,y,z\n1,2,3\n4,5,6\n");
    const PointCloud ca = load_point_cloud(a);
    REQUIRE(ca.size() == 2);
    CHECK(ca.points[1] == Vec3{4, 5, 6});
    const fs::path b = write_temp("no_header.csv", "1,2,3\r\n4,5,6\r\n");
    const PointCloud cb = load_point_cloud(b);
    REQUIRE(cb.size() == 2);
    CHECK(cb.points[0] == Vec3{1, 2, 3});
}

TEST_CASE("csv: header columns can be reordered") {
    const fs::path p = write_temp("reordered.csv", "z,id,x,y\n3,7,1,2\n");
    const PointCloud c = load_point_cloud(p);
    REQUIRE(c.size() == 1);
    CHECK(c.points[0] == Vec3{1, 2, 3});
}

TEST_CASE("ply ascii with colors and extra properties") {
    const std::string text =
        "ply\nformat ascii 1.0\ncomment test\n"
        "element vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\nproperty float intensity\n"
        "element face 0\nproperty list uchar int vertex_indices\nend_header\n"
        "1 2 3 255 0 10 0.5\n-1 -2 -3 0 128 0 0.25\n";
    const fs::path p = write_temp("ascii.ply", text);
    std::vector<std::string> warnings;
    const PointCloud c = load_point_cloud(p, {}, &warnings);
    REQUIRE(c.size() == 2);
    REQUIRE(c.has_colors());
    CHECK(c.points[1] == Vec3{-1, -2, -3});
    CHECK(c.colors[0] == Rgb{255, 0, 10});
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("ply: big endian is a parse error") {
    const fs::path p = write_temp("big.ply",
                                  "ply\nformat binary_big_endian 1.0\nelement vertex 0\n"
                                  "property float x\nproperty float y\nproperty float z\nend_header\n");
    CHECK(load_error(p) == ErrorKind::parse);
}

TEST_CASE("ply: truncated binary body is a parse error") {
    PointCloud c = random_cloud(3, 4, false);
    const fs::path p = testutil::tmp_dir() / "trunc.ply";
    save_point_cloud(c, p, CloudFormat::ply_binary_le);
    fs::resize_file(p, fs::file_size(p) - 5);
    CHECK(load_error(p) == ErrorKind::parse);
}

TEST_CASE("ply: binary float32 vertices") {
    std::string data =
        "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
        "property float x\nproperty float y\nproperty float z\nend_header\n";
    const float values[6] = {1.5f, -2.0f, 3.25f, 0.0f, 1e3f, -7.0f};
    data.append(reinterpret_cast<const char*>(values), sizeof(values));
    const fs::path p = write_temp("f32.ply", data);
    const PointCloud c = load_point_cloud(p);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0] == Vec3{1.5, -2.0, 3.25});
    CHECK(c.points[1] == Vec3{0.0, 1000.0, -7.0});
}

TEST_CASE("round trip: binary ply is bit-identical") {
    PointCloud c;
    c.points = {{0.1, 0.2, 0.3}, {-1e-300, 5e300, 1.0 / 3.0}, {7, 8, 9}};
    const fs::path p = testutil::tmp_dir() / "three.ply";
    save_point_cloud(c, p, CloudFormat::ply_binary_le);
    CHECK(bit_identical(c, load_point_cloud(p)));
}

TEST_CASE("round trip: random clouds in every format") {
    for (bool colors : {false, true}) {
        const PointCloud c = random_cloud(colors ? 11 : 10, 5000, colors);
        for (CloudFormat f : {CloudFormat::ply_binary_le, CloudFormat::ply_ascii, CloudFormat::xyz,
                              CloudFormat::csv}) {
            const fs::path p = testutil::tmp_dir() / "round_trip.dat";
            save_point_cloud(c, p, f);
            const PointCloud back = load_point_cloud(p, {f});
            REQUIRE(back.size() == c.size());
            double worst = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                worst = std::max(worst, std::sqrt(squared_distance(c.points[i], back.points[i])));
            }
            CHECK(worst <= 1e-6);
            if (f == CloudFormat::ply_binary_le) {
                CHECK(bit_identical(c, back));
            }
            if (colors && (f == CloudFormat::ply_binary_le || f == CloudFormat::ply_ascii)) {
                CHECK(back.colors == c.colors);
            }
        }
    }
}

TEST_CASE("round trip: one million points through binary ply") {
    const PointCloud c = random_cloud(99, 1000000, false);
    const fs::path p = testutil::tmp_dir() / "million.ply";
    save_point_cloud(c, p, CloudFormat::ply_binary_le);
    CHECK(bit_identical(c, load_point_cloud(p)));
    fs::remove(p);
}

TEST_CASE("auto format detects ply magic without the extension") {
    PointCloud c;
    c.points = {{1, 2, 3}};
    const fs::path p = testutil::tmp_dir() / "cloud_no_ext";
    save_point_cloud(c, p, CloudFormat::ply_binary_le);
    const PointCloud back = load_point_cloud(p);
    REQUIRE(back.size() == 1);
    CHECK(back.points[0] == Vec3{1, 2, 3});
}

TEST_CASE("unit scale multiplies coordinates") {
    const fs::path p = write_temp("meters.xyz", "0.001 0.002 -0.5\n");
    const PointCloud c = load_point_cloud(p, {CloudFormat::automatic, 1000.0});
    REQUIRE(c.size() == 1);
    CHECK(c.points[0].x == doctest::Approx(1.0));
    CHECK(c.points[0].y == doctest::Approx(2.0));
    CHECK(c.points[0].z == doctest::Approx(-500.0));
}

TEST_CASE("saving into a missing directory is an io error") {
    PointCloud c;
    c.points = {{0, 0, 0}};
    const fs::path p = testutil::tmp_dir() / "no_such_dir" / "out.xyz";
    try {
        save_point_cloud(c, p, CloudFormat::xyz);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
    }
}

TEST_CASE("format names") {
    CHECK(parse_cloud_format("ply-ascii") == CloudFormat::ply_ascii);
    CHECK(parse_cloud_format("ply-binary-le") == CloudFormat::ply_binary_le);
    CHECK(parse_cloud_format("csv") == CloudFormat::csv);
    CHECK(parse_cloud_format("auto") == CloudFormat::automatic);
    CHECK_THROWS_AS(parse_cloud_format("las"), Error);
    CHECK(format_for_path("a.PLY") == CloudFormat::ply_binary_le);
    CHECK(format_for_path("a.csv") == CloudFormat::csv);
    CHECK(format_for_path("a.xyz") == CloudFormat::xyz);
}
