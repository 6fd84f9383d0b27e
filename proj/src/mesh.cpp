#include "ffd/mesh.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ffd/error.hpp"
#include "ffd/serialize.hpp"

namespace ffd {

namespace {

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

std::string_view next_token(std::string_view& s) {
    s = trim_left(s);
    std::size_t end = 0;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != '\r') ++end;
    auto tok = s.substr(0, end);
    s.remove_prefix(end);
    return tok;
}

double parse_double(std::string_view tok, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("malformed number '" + std::string(tok) + "'", line);
    }
    return value;
}

long parse_face_index(std::string_view tok, std::size_t line) {
    // "a", "a/b", "a//c", "a/b/c": only the position index matters.
    auto slash = tok.find('/');
    auto head = tok.substr(0, slash);
    long value = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
    if (ec != std::errc{} || ptr != head.data() + head.size() || head.empty()) {
        throw ParseError("malformed face index '" + std::string(tok) + "'", line);
    }
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, ptr);
}

}  // namespace

void Mesh::validate() const {
    if (vertices.size() < 3) {
        throw DomainError("mesh needs at least 3 vertices, got " + std::to_string(vertices.size()));
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (auto idx : faces[f]) {
            if (idx >= vertices.size()) {
                throw IndexError("face " + std::to_string(f) + " references vertex " +
                                 std::to_string(idx) + " of " + std::to_string(vertices.size()));
            }
        }
    }
}

Box3 bounding_box(std::span<const Vec3> points) {
    if (points.empty()) throw DomainError("bounding box of an empty point set");
    Box3 box{points.front(), points.front()};
    for (const auto& p : points) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

Mesh parse_obj(std::string_view text, LoadStats* stats) {
    Mesh mesh;
    std::vector<std::array<long, 3>> raw_faces;
    std::vector<std::size_t> face_lines;
    std::size_t ignored = 0;
    std::size_t line_no = 0;

    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        std::string_view rest = line;
        auto tag = next_token(rest);
        if (tag.empty() || tag.front() == '#') continue;
        if (tag == "v") {
            Vec3 p;
            for (int c = 0; c < 3; ++c) {
                auto tok = next_token(rest);
                if (tok.empty()) throw ParseError("vertex needs 3 coordinates", line_no);
                p[c] = parse_double(tok, line_no);
            }
            // Optional w / vertex colour components are tolerated and dropped.
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<long> idx;
            for (auto tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
                idx.push_back(parse_face_index(tok, line_no));
            }
            if (idx.size() != 3) {
                throw DomainError("face " + std::to_string(raw_faces.size()) + " has " +
                                  std::to_string(idx.size()) + " vertices (line " +
                                  std::to_string(line_no) + "); only triangles are accepted");
            }
            raw_faces.push_back({idx[0], idx[1], idx[2]});
            face_lines.push_back(line_no);
        } else {
            ++ignored;
        }
    }

    const auto n = static_cast<long>(mesh.vertices.size());
    mesh.faces.reserve(raw_faces.size());
    for (std::size_t f = 0; f < raw_faces.size(); ++f) {
        Face face{};
        for (int c = 0; c < 3; ++c) {
            long i = raw_faces[f][c];
            // OBJ is 1-based; negative indices count back from the last vertex.
            long resolved = i > 0 ? i - 1 : n + i;
            if (i == 0 || resolved < 0 || resolved >= n) {
                throw IndexError("face " + std::to_string(f) + " has invalid vertex index " +
                                 std::to_string(i) + " (line " + std::to_string(face_lines[f]) +
                                 ")");
            }
            face[c] = static_cast<std::uint32_t>(resolved);
        }
        mesh.faces.push_back(face);
    }
    mesh.validate();
    if (stats) stats->ignored_records = ignored;
    return mesh;
}

std::string format_obj(const Mesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 24);
    for (const auto& v : mesh.vertices) {
        out += "v ";
        append_double(out, v.x());
        out += ' ';
        append_double(out, v.y());
        out += ' ';
        append_double(out, v.z());
        out += '\n';
    }
    for (const auto& f : mesh.faces) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
               std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

Mesh load_mesh(const std::filesystem::path& path, LoadStats* stats) {
    std::string text = read_file(path);
    if (path.extension() == ".json") {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON mesh: ") + e.what(), 0);
        }
        if (stats) stats->ignored_records = 0;
        return mesh_from_json(doc);
    }
    return parse_obj(text, stats);
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
    mesh.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    if (path.extension() == ".json") {
        out << mesh_to_json(mesh).dump();
    } else {
        out << format_obj(mesh);
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t vertex_hash(std::span<const Vec3> vertices) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& v : vertices) {
        for (int c = 0; c < 3; ++c) {
            std::uint64_t bits;
            double d = v[c];
            std::memcpy(&bits, &d, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xffu;
                h *= 1099511628211ull;
            }
        }
    }
    return h;
}

}  // namespace ffd
