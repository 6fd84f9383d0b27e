#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ffd {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

// Triangle mesh. Deformation only ever rewrites `vertices`; vertex count,
// ordering and `faces` are fixed once the mesh is built.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    std::size_t size() const noexcept { return vertices.size(); }

    // Throws IndexError on a face index >= size() and DomainError on N < 3.
    void validate() const;
};

struct Box3 {
    Vec3 min;
    Vec3 max;

    Vec3 extent() const { return max - min; }
    double diagonal() const { return extent().norm(); }
};

Box3 bounding_box(std::span<const Vec3> points);
inline Box3 bounding_box(const Mesh& mesh) { return bounding_box(mesh.vertices); }

// Reads OBJ (v/f records; other records are skipped and counted) or the JSON
// mesh format, chosen by extension (.json -> JSON, anything else -> OBJ).
struct LoadStats {
    std::size_t ignored_records = 0;
};
Mesh load_mesh(const std::filesystem::path& path, LoadStats* stats = nullptr);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);

Mesh parse_obj(std::string_view text, LoadStats* stats = nullptr);
std::string format_obj(const Mesh& mesh);

// Order-sensitive FNV-1a over the bit patterns of every coordinate.
std::uint64_t vertex_hash(std::span<const Vec3> vertices);

}  // namespace ffd
