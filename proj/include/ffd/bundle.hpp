#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ffd/lattice.hpp"
#include "ffd/pose.hpp"
#include "ffd/serialize.hpp"

namespace ffd {

inline constexpr int kBundleVersion = 1;

// Everything the interactive editor needs, with the coefficient matrix
// embedded row by row so a client only has to do a sparse mat-vec:
// vertex_q = sum_k values[q][k] * (P0 + delta)[indices[q][k]].
struct Bundle {
    int version = kBundleVersion;
    Mesh mesh;
    ControlGrid lattice;
    std::vector<std::vector<std::uint32_t>> indices;
    std::vector<std::vector<double>> values;
    DeformationField delta;
    std::optional<Pose> pose;

    // Throws DimensionError / DomainError on inconsistent sizes or rows whose
    // sum is more than 1e-9 away from 1.
    void check() const;

    std::vector<Vec3> evaluate(const std::vector<Vec3>& delta) const;
    std::vector<Vec3> evaluate() const { return evaluate(delta.delta); }
};

Bundle make_bundle(const ParameterizedMesh& pm, const std::optional<DeformationField>& delta = {},
                   const std::optional<Pose>& pose = {});

Json bundle_to_json(const Bundle& b);
Bundle bundle_from_json(const Json& doc);

void save_bundle(const Bundle& b, const std::filesystem::path& path);
Bundle load_bundle(const std::filesystem::path& path);

}  // namespace ffd
