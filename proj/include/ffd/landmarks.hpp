#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ffd/mesh.hpp"

namespace ffd {

enum class Region : std::uint8_t {
    Contour,
    RightEyebrow,
    LeftEyebrow,
    UpperNose,
    LowerNose,
    RightEye,
    LeftEye,
    UpperLip,
    LowerLip,
};

inline constexpr std::size_t kRegionCount = 9;
inline constexpr std::size_t kLandmarkCount = 68;

inline constexpr std::array<Region, kRegionCount> kAllRegions = {
    Region::Contour,  Region::RightEyebrow, Region::LeftEyebrow,
    Region::UpperNose, Region::LowerNose,   Region::RightEye,
    Region::LeftEye,  Region::UpperLip,     Region::LowerLip,
};

std::string_view region_name(Region r);
std::optional<Region> region_from_name(std::string_view name);

// Landmark numbers (0..67, iBUG-68 order) that make up each region.
const std::vector<std::uint32_t>& ibug_region_numbers(Region r);

// The 68 facial landmarks as mesh vertex indices, grouped into the 9 loss
// regions. `order()` is the 68-slot landmark ordering (iBUG numbering when
// the region sizes match the iBUG split, region concatenation otherwise).
class LandmarkScheme {
public:
    using RegionLists = std::array<std::vector<std::uint32_t>, kRegionCount>;

    // Validates count (68) and distinctness; throws DomainError otherwise.
    explicit LandmarkScheme(RegionLists regions);

    // Builds a scheme from 68 vertex indices given in iBUG order.
    static LandmarkScheme from_ibug_order(std::span<const std::uint32_t> vertices);

    const std::vector<std::uint32_t>& region(Region r) const {
        return regions_[static_cast<std::size_t>(r)];
    }
    const std::array<std::uint32_t, kLandmarkCount>& order() const { return order_; }

    // Position of each region's entries inside order().
    const std::vector<std::uint32_t>& region_slots(Region r) const {
        return slots_[static_cast<std::size_t>(r)];
    }

    // Throws IndexError naming the first index >= vertex_count.
    void check_against(std::size_t vertex_count) const;

private:
    RegionLists regions_;
    RegionLists slots_;
    std::array<std::uint32_t, kLandmarkCount> order_{};
};

struct LandmarkSample {
    std::array<Vec3, kLandmarkCount> points;
};

// Pure gather: points[q] = mesh.vertices[scheme.order()[q]].
LandmarkSample sample_landmarks(const Mesh& mesh, const LandmarkScheme& scheme);
std::vector<Vec3> sample_region(const Mesh& mesh, const LandmarkScheme& scheme, Region r);

LandmarkScheme load_landmark_scheme(const std::filesystem::path& path);
void save_landmark_scheme(const LandmarkScheme& scheme, const std::filesystem::path& path);

}  // namespace ffd
