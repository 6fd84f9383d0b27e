#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <set>

#include "ffd/error.hpp"
#include "ffd/landmarks.hpp"
#include "ffd/sample_face.hpp"
#include "scratch.hpp"

using namespace ffd;

namespace {
std::vector<std::uint32_t> iota_vertices(std::uint32_t offset) {
    std::vector<std::uint32_t> v(kLandmarkCount);
    std::iota(v.begin(), v.end(), offset);
    return v;
}
}  // namespace

TEST_CASE("iBUG region split covers 68 landmarks once") {
    std::set<std::uint32_t> seen;
    std::size_t total = 0;
    for (auto r : kAllRegions) {
        for (auto n : ibug_region_numbers(r)) seen.insert(n);
        total += ibug_region_numbers(r).size();
    }
    CHECK(total == 68);
    CHECK(seen.size() == 68);
    CHECK(*seen.rbegin() == 67);
    CHECK(ibug_region_numbers(Region::Contour).size() == 17);
    CHECK(ibug_region_numbers(Region::RightEye).size() == 6);
    CHECK(ibug_region_numbers(Region::UpperNose).size() == 4);
    CHECK(ibug_region_numbers(Region::LowerNose).size() == 5);
}

TEST_CASE("region names round trip") {
    for (auto r : kAllRegions) CHECK(region_from_name(region_name(r)) == r);
    CHECK(region_name(Region::LeftEyebrow) == "left_eyebrow");
    CHECK_FALSE(region_from_name("forehead").has_value());
}

TEST_CASE("scheme from iBUG order keeps iBUG numbering in order()") {
    const auto verts = iota_vertices(100);
    const auto s = LandmarkScheme::from_ibug_order(verts);
    for (std::size_t q = 0; q < kLandmarkCount; ++q) CHECK(s.order()[q] == 100 + q);
    CHECK(s.region(Region::Contour).front() == 100);
    CHECK(s.region(Region::LowerLip).size() == 8);
    for (auto r : kAllRegions) {
        const auto& slots = s.region_slots(r);
        for (std::size_t k = 0; k < slots.size(); ++k) CHECK(s.order()[slots[k]] == s.region(r)[k]);
    }
}

TEST_CASE("scheme with a non-iBUG split uses region concatenation") {
    LandmarkScheme::RegionLists lists;
    std::uint32_t next = 0;
    for (std::size_t r = 0; r < kRegionCount; ++r) {
        const std::size_t n = r == 0 ? 68 - 8 * (kRegionCount - 1) : 8;  // 4 + 8*8
        for (std::size_t k = 0; k < n; ++k) lists[r].push_back(next++ * 3);
    }
    const LandmarkScheme s(lists);
    for (std::size_t q = 0; q < kLandmarkCount; ++q) CHECK(s.order()[q] == 3 * q);
}

TEST_CASE("scheme validation") {
    auto verts = iota_vertices(0);
    verts[5] = verts[6];
    CHECK_THROWS_AS(LandmarkScheme::from_ibug_order(verts), DomainError);
    CHECK_THROWS_AS(LandmarkScheme::from_ibug_order(std::vector<std::uint32_t>(67, 0)), DomainError);
    const auto s = LandmarkScheme::from_ibug_order(iota_vertices(0));
    CHECK_NOTHROW(s.check_against(68));
    CHECK_THROWS_AS(s.check_against(67), IndexError);
}

TEST_CASE("landmark sampling is a gather") {
    Mesh m;
    for (int i = 0; i < 80; ++i) m.vertices.emplace_back(i, 2 * i, -i);
    const auto s = LandmarkScheme::from_ibug_order(iota_vertices(10));
    const auto lm = sample_landmarks(m, s);
    for (std::size_t q = 0; q < kLandmarkCount; ++q) CHECK(lm.points[q] == m.vertices[10 + q]);
    const auto eye = sample_region(m, s, Region::LeftEye);
    REQUIRE(eye.size() == 6);
    CHECK(eye[0] == m.vertices[10 + 42]);
}

TEST_CASE("scheme JSON round trip") {
    const auto s = LandmarkScheme::from_ibug_order(iota_vertices(7));
    const auto path = scratch_dir() / "scheme.json";
    save_landmark_scheme(s, path);
    const auto back = load_landmark_scheme(path);
    CHECK(back.order() == s.order());
}

TEST_CASE("synthetic sample face") {
    const auto face = make_synthetic_face(2000);
    CHECK(face.mesh.size() == 2000);
    CHECK_NOTHROW(face.mesh.validate());
    CHECK_NOTHROW(face.scheme.check_against(2000));
    CHECK(face.scheme.region(Region::Contour).size() == 17);
    // Deterministic.
    CHECK(vertex_hash(make_synthetic_face(2000).mesh.vertices) == vertex_hash(face.mesh.vertices));
    // Nose tip sits in front of the eye corners.
    const auto lm = sample_landmarks(face.mesh, face.scheme);
    CHECK(lm.points[30].z() > lm.points[36].z());
    CHECK(lm.points[8].y() < lm.points[27].y());  // chin below nose bridge
}

TEST_CASE("bundled sample data matches the generator") {
    const auto m = load_mesh(std::filesystem::path(FFD_DATA_DIR) / "sample_face.obj");
    CHECK(m.size() == kSampleFaceVertices);
    const auto face = make_synthetic_face();
    CHECK(vertex_hash(m.vertices) == vertex_hash(face.mesh.vertices));
    const auto s = load_landmark_scheme(std::filesystem::path(FFD_DATA_DIR) / "landmarks68.json");
    CHECK(s.order() == face.scheme.order());
}
