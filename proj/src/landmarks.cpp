#include "ffd/landmarks.hpp"

#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "ffd/error.hpp"

namespace ffd {

namespace {

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "contour",  "right_eyebrow", "left_eyebrow", "upper_nose", "lower_nose",
    "right_eye", "left_eye",     "upper_lip",    "lower_lip",
};

std::vector<std::uint32_t> range(std::uint32_t lo, std::uint32_t hi_inclusive) {
    std::vector<std::uint32_t> out(hi_inclusive - lo + 1);
    std::iota(out.begin(), out.end(), lo);
    return out;
}

std::vector<std::uint32_t> concat(std::vector<std::uint32_t> a, const std::vector<std::uint32_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

std::string_view region_name(Region r) { return kRegionNames[static_cast<std::size_t>(r)]; }

std::optional<Region> region_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kRegionCount; ++i) {
        if (kRegionNames[i] == name) return kAllRegions[i];
    }
    return std::nullopt;
}

const std::vector<std::uint32_t>& ibug_region_numbers(Region r) {
    static const std::array<std::vector<std::uint32_t>, kRegionCount> table = {
        range(0, 16),
        range(17, 21),
        range(22, 26),
        range(27, 30),
        range(31, 35),
        range(36, 41),
        range(42, 47),
        concat(range(48, 54), range(60, 64)),
        concat(range(55, 59), range(65, 67)),
    };
    return table[static_cast<std::size_t>(r)];
}

LandmarkScheme::LandmarkScheme(RegionLists regions) : regions_(std::move(regions)) {
    std::size_t total = 0;
    bool ibug_sizes = true;
    for (auto r : kAllRegions) {
        const auto& list = region(r);
        if (list.empty()) {
            throw DomainError("landmark region '" + std::string(region_name(r)) + "' is empty");
        }
        total += list.size();
        ibug_sizes = ibug_sizes && list.size() == ibug_region_numbers(r).size();
    }
    if (total != kLandmarkCount) {
        throw DomainError("landmark scheme must hold 68 indices, got " + std::to_string(total));
    }

    std::unordered_set<std::uint32_t> seen;
    std::uint32_t next = 0;
    for (auto r : kAllRegions) {
        auto ri = static_cast<std::size_t>(r);
        slots_[ri].clear();
        for (std::size_t k = 0; k < regions_[ri].size(); ++k) {
            auto v = regions_[ri][k];
            if (!seen.insert(v).second) {
                throw DomainError("vertex " + std::to_string(v) +
                                  " appears twice in the landmark scheme");
            }
            auto slot = ibug_sizes ? ibug_region_numbers(r)[k] : next++;
            order_[slot] = v;
            slots_[ri].push_back(slot);
        }
    }
}

LandmarkScheme LandmarkScheme::from_ibug_order(std::span<const std::uint32_t> vertices) {
    if (vertices.size() != kLandmarkCount) {
        throw DomainError("expected 68 landmark vertices, got " + std::to_string(vertices.size()));
    }
    RegionLists lists;
    for (auto r : kAllRegions) {
        for (auto n : ibug_region_numbers(r)) lists[static_cast<std::size_t>(r)].push_back(vertices[n]);
    }
    return LandmarkScheme(std::move(lists));
}

void LandmarkScheme::check_against(std::size_t vertex_count) const {
    for (auto r : kAllRegions) {
        for (auto v : region(r)) {
            if (v >= vertex_count) {
                throw IndexError("landmark vertex " + std::to_string(v) + " in region '" +
                                 std::string(region_name(r)) + "' is out of range for a mesh of " +
                                 std::to_string(vertex_count) + " vertices");
            }
        }
    }
}

LandmarkSample sample_landmarks(const Mesh& mesh, const LandmarkScheme& scheme) {
    scheme.check_against(mesh.size());
    LandmarkSample out;
    for (std::size_t q = 0; q < kLandmarkCount; ++q) out.points[q] = mesh.vertices[scheme.order()[q]];
    return out;
}

std::vector<Vec3> sample_region(const Mesh& mesh, const LandmarkScheme& scheme, Region r) {
    scheme.check_against(mesh.size());
    std::vector<Vec3> out;
    for (auto v : scheme.region(r)) out.push_back(mesh.vertices[v]);
    return out;
}

LandmarkScheme load_landmark_scheme(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid landmark scheme JSON: ") + e.what(), 0);
    }
    const auto& regions = doc.at("regions");
    LandmarkScheme::RegionLists lists;
    for (const auto& [key, value] : regions.items()) {
        auto r = region_from_name(key);
        if (!r) throw DomainError("unknown landmark region '" + key + "'");
        lists[static_cast<std::size_t>(*r)] = value.get<std::vector<std::uint32_t>>();
    }
    return LandmarkScheme(std::move(lists));
}

void save_landmark_scheme(const LandmarkScheme& scheme, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    auto& regions = doc["regions"];
    for (auto r : kAllRegions) regions[std::string(region_name(r))] = scheme.region(r);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(1) << '\n';
}

}  // namespace ffd
