#include "collimetric/point_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "collimetric/error.hpp"

namespace collimetric {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
    const auto first = std::find_if(s.begin(), s.end(), not_space);
    const auto last = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return first < last ? std::string_view(&*first, static_cast<std::size_t>(last - first))
                        : std::string_view{};
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(line.substr(start, pos - start));
        }
    }
    return tokens;
}

std::optional<double> parse_double(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        return std::nullopt;
    }
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::io, "failed reading '" + path.string() + "'");
    }
    return std::move(buffer).str();
}

// Splits into lines, tolerating \r\n endings.
class LineReader {
public:
    explicit LineReader(std::string_view text, std::size_t offset = 0, std::size_t line_no = 0)
        : text_(text), pos_(offset), line_no_(line_no) {}

    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) {
            return false;
        }
        std::size_t end = text_.find('\n', pos_);
        if (end == std::string_view::npos) {
            end = text_.size();
        }
        line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        pos_ = end + 1;
        ++line_no_;
        return true;
    }

    std::size_t line_no() const { return line_no_; }
    std::size_t offset() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_;
    std::size_t line_no_;
};

struct Loaded {
    std::vector<Point3> points;
    std::vector<Rgb> colors;
};

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& where,
                             const std::string& what) {
    throw Error(ErrorKind::parse, path.string() + ": " + where + ": " + what);
}

// ---------------------------------------------------------------- PLY

enum class PlyType { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

std::optional<PlyType> ply_type(std::string_view name) {
    static const std::array<std::pair<std::string_view, PlyType>, 16> table{{
        {"char", PlyType::int8},     {"int8", PlyType::int8},
        {"uchar", PlyType::uint8},   {"uint8", PlyType::uint8},
        {"short", PlyType::int16},   {"int16", PlyType::int16},
        {"ushort", PlyType::uint16}, {"uint16", PlyType::uint16},
        {"int", PlyType::int32},     {"int32", PlyType::int32},
        {"uint", PlyType::uint32},   {"uint32", PlyType::uint32},
        {"float", PlyType::float32}, {"float32", PlyType::float32},
        {"double", PlyType::float64}, {"float64", PlyType::float64},
    }};
    for (const auto& [key, type] : table) {
        if (key == name) {
            return type;
        }
    }
    return std::nullopt;
}

std::size_t ply_size(PlyType type) {
    switch (type) {
    case PlyType::int8:
    case PlyType::uint8: return 1;
    case PlyType::int16:
    case PlyType::uint16: return 2;
    case PlyType::int32:
    case PlyType::uint32:
    case PlyType::float32: return 4;
    case PlyType::float64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::float32;
    bool is_list = false;
    PlyType count_type = PlyType::uint8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
    std::size_t data_offset = 0;
    std::size_t header_lines = 0;
};

PlyHeader parse_ply_header(std::string_view text, const std::filesystem::path& path) {
    PlyHeader header;
    LineReader lines(text);
    std::string_view line;
    if (!lines.next(line) || trim(line) != "ply") {
        parse_fail(path, "line 1", "missing 'ply' magic");
    }
    bool have_format = false;
    bool ended = false;
    while (lines.next(line)) {
        const auto tokens = split_whitespace(line);
        const std::string where = "line " + std::to_string(lines.line_no());
        if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") {
            continue;
        }
        if (tokens[0] == "end_header") {
            ended = true;
            break;
        }
        if (tokens[0] == "format") {
            if (tokens.size() < 2) {
                parse_fail(path, where, "malformed format line");
            }
            if (tokens[1] == "ascii") {
                header.binary = false;
            } else if (tokens[1] == "binary_little_endian") {
                header.binary = true;
            } else {
                parse_fail(path, where, "unsupported PLY format '" + std::string(tokens[1]) + "'");
            }
            have_format = true;
        } else if (tokens[0] == "element") {
            std::size_t count = 0;
            if (tokens.size() != 3 ||
                std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count).ec !=
                    std::errc{}) {
                parse_fail(path, where, "malformed element line");
            }
            header.elements.push_back({std::string(tokens[1]), count, {}});
        } else if (tokens[0] == "property") {
            if (header.elements.empty()) {
                parse_fail(path, where, "property before any element");
            }
            PlyProperty prop;
            if (tokens.size() == 5 && tokens[1] == "list") {
                const auto count_type = ply_type(tokens[2]);
                const auto item_type = ply_type(tokens[3]);
                if (!count_type || !item_type) {
                    parse_fail(path, where, "unknown list property type");
                }
                prop = {std::string(tokens[4]), *item_type, true, *count_type};
            } else if (tokens.size() == 3) {
                const auto type = ply_type(tokens[1]);
                if (!type) {
                    parse_fail(path, where, "unknown property type '" + std::string(tokens[1]) + "'");
                }
                prop = {std::string(tokens[2]), *type, false, PlyType::uint8};
            } else {
                parse_fail(path, where, "malformed property line");
            }
            header.elements.back().properties.push_back(std::move(prop));
        } else {
            parse_fail(path, where, "unexpected header keyword '" + std::string(tokens[0]) + "'");
        }
    }
    if (!ended) {
        parse_fail(path, "header", "missing end_header");
    }
    if (!have_format) {
        parse_fail(path, "header", "missing format line");
    }
    header.data_offset = lines.offset();
    header.header_lines = lines.line_no();
    return header;
}

// Role of each vertex property in the output.
enum class Slot { ignore, x, y, z, r, g, b };

std::vector<Slot> vertex_slots(const PlyElement& vertex, const std::filesystem::path& path,
                               std::vector<std::string>* warnings, bool& has_colors) {
    std::vector<Slot> slots;
    std::array<bool, 6> seen{};
    for (const PlyProperty& prop : vertex.properties) {
        Slot slot = Slot::ignore;
        const std::string name = lower(prop.name);
        if (!prop.is_list) {
            if (name == "x" || name == "y" || name == "z") {
                if (prop.type != PlyType::float32 && prop.type != PlyType::float64) {
                    parse_fail(path, "header", "vertex property '" + prop.name +
                                                   "' must be float or double");
                }
                slot = name == "x" ? Slot::x : (name == "y" ? Slot::y : Slot::z);
            } else if ((name == "red" || name == "r" || name == "green" || name == "g" ||
                        name == "blue" || name == "b") &&
                       prop.type == PlyType::uint8) {
                slot = name[0] == 'r' ? Slot::r : (name[0] == 'g' ? Slot::g : Slot::b);
            }
        }
        if (slot != Slot::ignore) {
            seen[static_cast<int>(slot) - 1] = true;
        } else if (warnings != nullptr) {
            warnings->push_back(path.string() + ": ignoring vertex property '" + prop.name + "'");
        }
        slots.push_back(slot);
    }
    if (!seen[0] || !seen[1] || !seen[2]) {
        parse_fail(path, "header", "vertex element lacks x, y and z properties");
    }
    has_colors = seen[3] && seen[4] && seen[5];
    return slots;
}

template <typename T>
T read_le(const char* data) {
    T value;
    std::memcpy(&value, data, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto* bytes = reinterpret_cast<unsigned char*>(&value);
        std::reverse(bytes, bytes + sizeof(T));
    }
    return value;
}

double read_binary_scalar(PlyType type, const char* data) {
    switch (type) {
    case PlyType::int8: return static_cast<double>(read_le<std::int8_t>(data));
    case PlyType::uint8: return static_cast<double>(read_le<std::uint8_t>(data));
    case PlyType::int16: return static_cast<double>(read_le<std::int16_t>(data));
    case PlyType::uint16: return static_cast<double>(read_le<std::uint16_t>(data));
    case PlyType::int32: return static_cast<double>(read_le<std::int32_t>(data));
    case PlyType::uint32: return static_cast<double>(read_le<std::uint32_t>(data));
    case PlyType::float32: return static_cast<double>(read_le<float>(data));
    case PlyType::float64: return read_le<double>(data);
    }
    return 0.0;
}

struct VertexSink {
    const std::vector<Slot>* slots = nullptr;
    bool has_colors = false;
    Loaded* out = nullptr;
    std::array<double, 6> values{};

    void begin() { values.fill(0.0); }
    void set(std::size_t property, double value) {
        const Slot slot = (*slots)[property];
        if (slot != Slot::ignore) {
            values[static_cast<int>(slot) - 1] = value;
        }
    }
    void end() {
        out->points.push_back({values[0], values[1], values[2]});
        if (has_colors) {
            out->colors.push_back({static_cast<std::uint8_t>(values[3]),
                                   static_cast<std::uint8_t>(values[4]),
                                   static_cast<std::uint8_t>(values[5])});
        }
    }
};

void read_ply_binary(std::string_view data, const PlyHeader& header,
                     const std::filesystem::path& path, VertexSink& sink) {
    std::size_t pos = header.data_offset;
    const auto need = [&](std::size_t bytes) {
        if (pos + bytes > data.size()) {
            parse_fail(path, "byte offset " + std::to_string(pos), "unexpected end of data");
        }
    };
    for (const PlyElement& element : header.elements) {
        const bool is_vertex = element.name == "vertex";
        for (std::size_t record = 0; record < element.count; ++record) {
            if (is_vertex) {
                sink.begin();
            }
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const PlyProperty& prop = element.properties[p];
                if (prop.is_list) {
                    need(ply_size(prop.count_type));
                    const double count = read_binary_scalar(prop.count_type, data.data() + pos);
                    pos += ply_size(prop.count_type);
                    if (count < 0) {
                        parse_fail(path, "byte offset " + std::to_string(pos), "negative list count");
                    }
                    const std::size_t bytes = static_cast<std::size_t>(count) * ply_size(prop.type);
                    need(bytes);
                    pos += bytes;
                } else {
                    need(ply_size(prop.type));
                    if (is_vertex) {
                        sink.set(p, read_binary_scalar(prop.type, data.data() + pos));
                    }
                    pos += ply_size(prop.type);
                }
            }
            if (is_vertex) {
                sink.end();
            }
        }
        if (is_vertex) {
            return;
        }
    }
}

void read_ply_ascii(std::string_view data, const PlyHeader& header,
                    const std::filesystem::path& path, VertexSink& sink) {
    LineReader lines(data, header.data_offset, header.header_lines);
    for (const PlyElement& element : header.elements) {
        const bool is_vertex = element.name == "vertex";
        for (std::size_t record = 0; record < element.count; ++record) {
            std::string_view line;
            do {
                if (!lines.next(line)) {
                    parse_fail(path, "line " + std::to_string(lines.line_no() + 1),
                               "unexpected end of file in element '" + element.name + "'");
                }
            } while (trim(line).empty());
            if (!is_vertex) {
                continue;
            }
            const std::string where = "line " + std::to_string(lines.line_no());
            const auto tokens = split_whitespace(line);
            std::size_t t = 0;
            sink.begin();
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const PlyProperty& prop = element.properties[p];
                if (t >= tokens.size()) {
                    parse_fail(path, where, "too few values in vertex record");
                }
                const auto value = parse_double(tokens[t++]);
                if (!value) {
                    parse_fail(path, where, "invalid number '" + std::string(tokens[t - 1]) + "'");
                }
                if (prop.is_list) {
                    t += static_cast<std::size_t>(std::max(0.0, *value));
                } else {
                    sink.set(p, *value);
                }
            }
            sink.end();
        }
        if (is_vertex) {
            return;
        }
    }
}

Loaded load_ply(std::string_view data, CloudFormat expected, const std::filesystem::path& path,
                std::vector<std::string>* warnings) {
    const PlyHeader header = parse_ply_header(data, path);
    if (expected == CloudFormat::ply_ascii && header.binary) {
        parse_fail(path, "header", "expected ASCII PLY, found binary");
    }
    if (expected == CloudFormat::ply_binary_le && !header.binary) {
        parse_fail(path, "header", "expected binary PLY, found ASCII");
    }
    const auto vertex = std::find_if(header.elements.begin(), header.elements.end(),
                                     [](const PlyElement& e) { return e.name == "vertex"; });
    Loaded loaded;
    if (vertex == header.elements.end()) {
        parse_fail(path, "header", "no vertex element");
    }
    if (warnings != nullptr) {
        for (const PlyElement& e : header.elements) {
            if (e.name != "vertex") {
                warnings->push_back(path.string() + ": ignoring element '" + e.name + "'");
            }
        }
    }
    VertexSink sink;
    const std::vector<Slot> slots = vertex_slots(*vertex, path, warnings, sink.has_colors);
    sink.slots = &slots;
    sink.out = &loaded;
    loaded.points.reserve(vertex->count);
    if (header.binary) {
        read_ply_binary(data, header, path, sink);
    } else {
        read_ply_ascii(data, header, path, sink);
    }
    return loaded;
}

// ---------------------------------------------------------------- XYZ / CSV

Loaded load_xyz(std::string_view data, const std::filesystem::path& path) {
    Loaded loaded;
    LineReader lines(data);
    std::string_view line;
    while (lines.next(line)) {
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = split_whitespace(line);
        if (tokens.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(lines.line_no());
        if (tokens.size() < 3) {
            parse_fail(path, where, "expected at least 3 columns");
        }
        std::array<double, 3> xyz{};
        for (int k = 0; k < 3; ++k) {
            const auto value = parse_double(tokens[k]);
            if (!value) {
                parse_fail(path, where, "invalid number '" + std::string(tokens[k]) + "'");
            }
            xyz[k] = *value;
        }
        loaded.points.push_back({xyz[0], xyz[1], xyz[2]});
    }
    return loaded;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = trim(line.substr(start, comma - start));
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
            field = field.substr(1, field.size() - 2);
        }
        fields.push_back(field);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

Loaded load_csv(std::string_view data, const std::filesystem::path& path) {
    Loaded loaded;
    LineReader lines(data);
    std::string_view line;
    std::array<std::size_t, 3> columns{0, 1, 2};
    bool first = true;
    while (lines.next(line)) {
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        const std::string where = "line " + std::to_string(lines.line_no());
        if (first) {
            first = false;
            const bool numeric = fields.size() >= 3 && parse_double(fields[0]) &&
                                 parse_double(fields[1]) && parse_double(fields[2]);
            if (!numeric) {
                std::array<bool, 3> found{};
                for (std::size_t c = 0; c < fields.size(); ++c) {
                    const std::string name = lower(fields[c]);
                    for (int k = 0; k < 3; ++k) {
                        if (name == std::string(1, static_cast<char>('x' + k))) {
                            columns[k] = c;
                            found[k] = true;
                        }
                    }
                }
                if (!found[0] || !found[1] || !found[2]) {
                    parse_fail(path, where, "CSV header must name columns x, y and z");
                }
                continue;
            }
        }
        std::array<double, 3> xyz{};
        for (int k = 0; k < 3; ++k) {
            if (columns[k] >= fields.size()) {
                parse_fail(path, where, "missing column " + std::to_string(columns[k] + 1));
            }
            const auto value = parse_double(fields[columns[k]]);
            if (!value) {
                parse_fail(path, where, "invalid number '" + std::string(fields[columns[k]]) + "'");
            }
            xyz[k] = *value;
        }
        loaded.points.push_back({xyz[0], xyz[1], xyz[2]});
    }
    return loaded;
}

CloudFormat infer_format(const std::filesystem::path& path, std::string_view data) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".ply") {
        return CloudFormat::automatic;  // resolved from the PLY header
    }
    if (ext == ".csv") {
        return CloudFormat::csv;
    }
    if (ext == ".xyz" || ext == ".txt" || ext == ".pts") {
        return CloudFormat::xyz;
    }
    if (data.substr(0, 3) == "ply" && (data.size() == 3 || data[3] == '\n' || data[3] == '\r')) {
        return CloudFormat::automatic;
    }
    return CloudFormat::xyz;
}

// ---------------------------------------------------------------- writers

void append_number(std::string& out, double value) {
    std::array<char, 32> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), result.ptr);
}

void append_row(std::string& out, const PointCloud& cloud, std::size_t i, char sep) {
    const Point3& p = cloud.points[i];
    append_number(out, p.x);
    out += sep;
    append_number(out, p.y);
    out += sep;
    append_number(out, p.z);
    if (cloud.has_colors()) {
        const Rgb c = cloud.colors[i];
        for (int value : {int{c.r}, int{c.g}, int{c.b}}) {
            out += sep;
            out += std::to_string(value);
        }
    }
    out += '\n';
}

std::string ply_header(const PointCloud& cloud, bool binary) {
    std::string header = "ply\n";
    header += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
    header += "comment generated by collimetric\n";
    header += "element vertex " + std::to_string(cloud.size()) + "\n";
    header += "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_colors()) {
        header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    }
    header += "end_header\n";
    return header;
}

template <typename T>
void append_le(std::string& out, T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto* bytes = reinterpret_cast<unsigned char*>(&value);
        std::reverse(bytes, bytes + sizeof(T));
    }
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

} // namespace

CloudFormat parse_cloud_format(std::string_view name) {
    const std::string n = lower(name);
    if (n == "ply-ascii") return CloudFormat::ply_ascii;
    if (n == "ply-binary-le" || n == "ply") return CloudFormat::ply_binary_le;
    if (n == "xyz") return CloudFormat::xyz;
    if (n == "csv") return CloudFormat::csv;
    if (n == "auto") return CloudFormat::automatic;
    throw Error(ErrorKind::invalid_argument, "unknown point cloud format '" + std::string(name) + "'");
}

CloudFormat format_for_path(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".ply") return CloudFormat::ply_binary_le;
    if (ext == ".csv") return CloudFormat::csv;
    return CloudFormat::xyz;
}

PointCloud load_point_cloud(const std::filesystem::path& path, const LoadOptions& options,
                            std::vector<std::string>* warnings) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::io, "file not found: '" + path.string() + "'");
    }
    const std::string data = read_file(path);
    CloudFormat format = options.format;
    if (format == CloudFormat::automatic) {
        format = infer_format(path, data);
    }
    Loaded loaded;
    switch (format) {
    case CloudFormat::xyz: loaded = load_xyz(data, path); break;
    case CloudFormat::csv: loaded = load_csv(data, path); break;
    default: loaded = load_ply(data, format, path, warnings); break;
    }
    for (std::size_t i = 0; i < loaded.points.size(); ++i) {
        Point3& p = loaded.points[i];
        if (!is_finite(p)) {
            throw Error(ErrorKind::non_finite,
                        path.string() + ": non-finite coordinate at record " + std::to_string(i));
        }
        if (options.unit_scale != 1.0) {
            p = options.unit_scale * p;
        }
    }
    return {std::move(loaded.points), std::move(loaded.colors)};
}

void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                      CloudFormat format) {
    if (format == CloudFormat::automatic) {
        format = format_for_path(path);
    }
    std::string out;
    switch (format) {
    case CloudFormat::ply_binary_le: {
        out = ply_header(cloud, true);
        out.reserve(out.size() + cloud.size() * (24 + (cloud.has_colors() ? 3 : 0)));
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const Point3& p = cloud.points[i];
            append_le(out, p.x);
            append_le(out, p.y);
            append_le(out, p.z);
            if (cloud.has_colors()) {
                out += static_cast<char>(cloud.colors[i].r);
                out += static_cast<char>(cloud.colors[i].g);
                out += static_cast<char>(cloud.colors[i].b);
            }
        }
        break;
    }
    case CloudFormat::ply_ascii:
        out = ply_header(cloud, false);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            append_row(out, cloud, i, ' ');
        }
        break;
    case CloudFormat::xyz:
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            append_row(out, cloud, i, ' ');
        }
        break;
    case CloudFormat::csv:
        out = cloud.has_colors() ? "x,y,z,r,g,b\n" : "x,y,z\n";
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            append_row(out, cloud, i, ',');
        }
        break;
    case CloudFormat::automatic: break;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    }
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) {
        throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
    }
}

} // namespace collimetric
