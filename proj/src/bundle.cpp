#include "ffd/bundle.hpp"

#include <cmath>
#include <string>

#include "ffd/error.hpp"

namespace ffd {

void Bundle::check() const {
    if (version != kBundleVersion) {
        throw DomainError("unsupported bundle version " + std::to_string(version));
    }
    mesh.validate();
    const auto m = lattice.config.control_point_count();
    if (lattice.points.size() != m) throw DimensionError("bundle lattice point count mismatch");
    if (indices.size() != mesh.size() || values.size() != mesh.size()) {
        throw DimensionError("bundle needs one coefficient row per vertex");
    }
    delta.check(m);
    for (std::size_t q = 0; q < indices.size(); ++q) {
        if (indices[q].size() != values[q].size()) {
            throw DimensionError("coefficient row " + std::to_string(q) + " is ragged");
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < indices[q].size(); ++k) {
            if (indices[q][k] >= m) {
                throw IndexError("coefficient row " + std::to_string(q) + " references control point " +
                                 std::to_string(indices[q][k]));
            }
            sum += values[q][k];
        }
        if (!(std::abs(sum - 1.0) <= 1e-9)) {
            throw DomainError("coefficient row " + std::to_string(q) + " sums to " +
                              std::to_string(sum) + ", expected 1");
        }
    }
}

std::vector<Vec3> Bundle::evaluate(const std::vector<Vec3>& d) const {
    if (d.size() != lattice.points.size()) throw DimensionError("delta size mismatch");
    std::vector<Vec3> out(mesh.size(), Vec3::Zero());
    for (std::size_t q = 0; q < out.size(); ++q) {
        for (std::size_t k = 0; k < indices[q].size(); ++k) {
            const auto c = indices[q][k];
            out[q] += values[q][k] * (lattice.points[c] + d[c]);
        }
    }
    return out;
}

Bundle make_bundle(const ParameterizedMesh& pm, const std::optional<DeformationField>& delta,
                   const std::optional<Pose>& pose) {
    Bundle b;
    b.mesh = pm.mesh;
    b.lattice = pm.grid;
    const auto n = pm.mesh.size();
    b.indices.reserve(n);
    b.values.reserve(n);
    for (std::size_t q = 0; q < n; ++q) {
        b.indices.push_back(pm.coeffs.row_columns(q));
        const auto v = pm.coeffs.row_values(q);
        b.values.emplace_back(v.begin(), v.end());
    }
    b.delta = delta ? *delta : DeformationField::zero(pm.control_point_count());
    b.pose = pose;
    b.check();
    return b;
}

Json bundle_to_json(const Bundle& b) {
    Json doc = {{"version", b.version},
                {"mesh", mesh_to_json(b.mesh)},
                {"lattice", lattice_to_json(b.lattice)},
                {"coeffs", {{"indices", b.indices}, {"values", b.values}}},
                {"delta", field_to_json(b.delta).at("delta")}};
    if (b.pose) doc["pose"] = pose_to_json(*b.pose);
    return doc;
}

Bundle bundle_from_json(const Json& doc) {
    Bundle b;
    b.version = doc.at("version").get<int>();
    if (b.version != kBundleVersion) {
        throw DomainError("unsupported bundle version " + std::to_string(b.version));
    }
    b.mesh = mesh_from_json(doc.at("mesh"));
    b.lattice = lattice_from_json(doc.at("lattice"));
    b.indices = doc.at("coeffs").at("indices").get<std::vector<std::vector<std::uint32_t>>>();
    b.values = doc.at("coeffs").at("values").get<std::vector<std::vector<double>>>();
    b.delta = field_from_json(Json{{"delta", doc.at("delta")}});
    if (doc.contains("pose") && !doc["pose"].is_null()) b.pose = pose_from_json(doc["pose"]);
    b.check();
    return b;
}

void save_bundle(const Bundle& b, const std::filesystem::path& path) {
    b.check();
    write_json_file(bundle_to_json(b), path);
}

Bundle load_bundle(const std::filesystem::path& path) { return bundle_from_json(read_json_file(path)); }

}  // namespace ffd
