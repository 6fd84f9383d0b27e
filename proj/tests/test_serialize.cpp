#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ffd/bundle.hpp"
#include "ffd/error.hpp"
#include "ffd/sample_face.hpp"
#include "ffd/serialize.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace ffd;
namespace fs = std::filesystem;

namespace {

const SyntheticFace& face() {
    static const SyntheticFace f = make_synthetic_face(1500);
    return f;
}

const ParameterizedMesh& pm() {
    static const ParameterizedMesh p =
        parameterize(face().mesh, build_lattice(face().mesh, kDefaultDims, BasisKind::bspline(3)));
    return p;
}

fs::path tmp(const char* name) { return scratch_dir() / name; }

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

}  // namespace

TEST_CASE("lattice JSON round trip") {
    const auto back = lattice_from_json(Json::parse(lattice_to_json(pm().grid).dump()));
    CHECK(back.config.dims == pm().grid.config.dims);
    CHECK(back.config.kind == pm().grid.config.kind);
    CHECK(back.config.origin == pm().grid.config.origin);
    CHECK(back.config.lengths == pm().grid.config.lengths);
    CHECK(back.config.axis_map == pm().grid.config.axis_map);
    CHECK(back.points == pm().grid.points);
    auto doc = lattice_to_json(pm().grid);
    doc["dims"] = {2, 2, 2};
    CHECK_THROWS(lattice_from_json(doc));
}

TEST_CASE("field and pose JSON") {
    std::mt19937_64 rng(3);
    DeformationField f = DeformationField::zero(700);
    std::normal_distribution<double> g;
    for (auto& v : f.delta) v = Vec3(g(rng), g(rng), g(rng)) / 3.0;
    CHECK(field_from_json(Json::parse(field_to_json(f).dump())).delta == f.delta);

    const Pose p{1.25, oracle::random_rotation(rng), Vec3(0.1, 0.2, 0.3)};
    const Pose q = pose_from_json(Json::parse(pose_to_json(p).dump()));
    CHECK(q.scale == p.scale);
    CHECK(q.rotation == p.rotation);
    CHECK(q.translation == p.translation);

    Json m;
    const Mat34 a = p.as_matrix();
    m["matrix"] = Json::array();
    for (int r = 0; r < 3; ++r) m["matrix"].push_back({a(r, 0), a(r, 1), a(r, 2), a(r, 3)});
    const Pose r = pose_from_json(m);
    CHECK(r.scale == doctest::Approx(1.25).epsilon(1e-14));
    CHECK((r.rotation - p.rotation).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("weights JSON overrides only given keys") {
    const auto w = weights_from_json(Json::parse(R"({"vertex": 0.5, "regions": {"left_eye": 0.2}})"));
    CHECK(w.vertex == 0.5);
    CHECK(w.region(Region::LeftEye) == 0.2);
    CHECK(w.region(Region::Contour) == kDefaultRegionWeight);
    CHECK_THROWS(weights_from_json(Json::parse(R"({"regions": {"forehead": 1}})")));
    CHECK_THROWS(weights_from_json(Json::parse(R"({"vertex": -1})")));
    const auto back = weights_from_json(weights_to_json(w));
    CHECK(back.regions == w.regions);
}

TEST_CASE("parameterization JSON round trip is exact") {
    const auto back = parameterization_from_json(Json::parse(parameterization_to_json(pm()).dump()));
    CHECK(back.params == pm().params);
    CHECK(back.coeffs.values() == pm().coeffs.values());
    CHECK(vertex_hash(back.mesh.vertices) == vertex_hash(pm().mesh.vertices));
    CHECK(back.max_residual == pm().max_residual);
}

TEST_CASE("records JSON lines") {
    EvalRecord r;
    for (std::size_t q = 0; q < kLandmarkCount; ++q) {
        r.gt[q] = Vec3(q, q + 1, q + 2);
        r.pred[q] = r.gt[q] + Vec3(0.5, 0, 0);
    }
    r.box_width = 100;
    r.box_height = 120;
    r.yaw = -33;
    const auto line = record_to_json(r).dump();
    const auto p = tmp("ffd_records.jsonl");
    write_text(p, line + "\n\n" + line + "\n");
    const auto recs = load_records_jsonl(p);
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].yaw == -33);
    CHECK(recs[1].pred == r.pred);

    write_text(p, line + "\n{\"pred\": [1,2]}\n");
    try {
        load_records_jsonl(p);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    write_text(p, line + "\nnot json\n");
    CHECK_THROWS_AS(load_records_jsonl(p), ParseError);
    write_text(p, "");
    CHECK_THROWS(load_records_jsonl(p));
}

TEST_CASE("bundle rows are sparse, sum to one and evaluate like deform") {
    const auto b = make_bundle(pm());
    CHECK_NOTHROW(b.check());
    CHECK(b.version == 1);
    std::size_t widest = 0;
    for (const auto& row : b.indices) widest = std::max(widest, row.size());
    CHECK(widest <= 64);
    for (const auto& v : b.delta.delta) CHECK(v == Vec3::Zero());
    CHECK_FALSE(b.pose.has_value());

    const auto p = tmp("ffd_bundle.json");
    save_bundle(b, p);
    const auto back = load_bundle(p);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 10; ++t) {
        std::vector<Vec3> d(700);
        for (auto& v : d) v = Vec3(u(rng), u(rng), u(rng));
        const auto ui = back.evaluate(d);
        const auto lib = deformed_vertices(pm(), d);
        CHECK(oracle::max_abs_diff(ui, lib) <= 1e-6);
    }
}

TEST_CASE("bundle with delta and pose, and consistency checks") {
    const auto d = DeformationField::constant(700, Vec3(1, 0, 0));
    const Pose pose{2.0, Mat3::Identity(), Vec3(0, 0, 5)};
    const auto b = make_bundle(pm(), d, pose);
    const auto doc = bundle_to_json(b);
    CHECK(doc.contains("pose"));
    CHECK(doc["coeffs"].contains("indices"));
    CHECK(doc["coeffs"].contains("values"));
    const auto back = bundle_from_json(doc);
    REQUIRE(back.pose.has_value());
    CHECK(back.pose->scale == 2.0);
    CHECK(back.delta.delta == d.delta);

    auto broken = doc;
    broken["version"] = 2;
    CHECK_THROWS_AS(bundle_from_json(broken), DomainError);
    auto skew = b;
    skew.values[0][0] += 1e-6;
    CHECK_THROWS_AS(skew.check(), DomainError);
    auto ragged = b;
    ragged.values[1].pop_back();
    CHECK_THROWS_AS(ragged.check(), DimensionError);
    auto oob = b;
    oob.indices[2][0] = 700;
    CHECK_THROWS_AS(oob.check(), IndexError);
}
