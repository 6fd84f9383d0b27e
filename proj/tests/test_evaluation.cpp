#include <doctest.h>

#include <cmath>
#include <set>

#include "ffd/error.hpp"
#include "ffd/evaluation.hpp"
#include "ffd/sample_face.hpp"

using namespace ffd;

namespace {

// Every prediction is shifted by (dx, dy) and an arbitrary z offset, which NME ignores.
EvalRecord shifted_record(double dx, double dy, double w, double h, double yaw) {
    EvalRecord r;
    for (std::size_t q = 0; q < kLandmarkCount; ++q) {
        r.gt[q] = Vec3(double(q), 2.0 * double(q), 0.0);
        r.pred[q] = r.gt[q] + Vec3(dx, dy, 17.0 * double(q % 3));
    }
    r.box_width = w;
    r.box_height = h;
    r.yaw = yaw;
    return r;
}

}  // namespace

TEST_CASE("NME by hand") {
    CHECK(nme(shifted_record(3, 4, 100, 100, 0)) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(nme(shifted_record(6, 8, 50, 200, 0)) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(nme(shifted_record(6, 8, 50, 200, 0), NmeNormalization::MaxSide) == doctest::Approx(0.05));
    CHECK(nme(shifted_record(3, 4, 30, 40, 0), NmeNormalization::Diagonal) == doctest::Approx(0.1));
    // Half the points exact, half off by 10: mean 5.
    auto r = shifted_record(0, 0, 25, 25, 0);
    for (std::size_t q = 0; q < kLandmarkCount; q += 2) r.pred[q].x() += 10.0;
    CHECK(nme(r) == doctest::Approx(0.2));
    CHECK_THROWS_AS(nme(shifted_record(1, 1, 0, 10, 0)), DomainError);
}

TEST_CASE("yaw bins use absolute yaw and half-open edges") {
    CHECK(yaw_bin(0.0) == 0);
    CHECK(yaw_bin(29.999) == 0);
    CHECK(yaw_bin(30.0) == 1);
    CHECK(yaw_bin(-45.0) == 1);
    CHECK(yaw_bin(60.0) == 2);
    CHECK(yaw_bin(90.0) == 2);
    CHECK(yaw_bin(-90.0) == 2);
    CHECK_THROWS_AS(yaw_bin(90.5), DomainError);
    CHECK_THROWS_AS(yaw_bin(std::nan("")), DomainError);
}

TEST_CASE("table arithmetic") {
    const auto t = table_from_bins({2.60, 3.44, 4.50});
    CHECK(t.mean == doctest::Approx((2.60 + 3.44 + 4.50) / 3.0));
    const auto text = format_table(t, "3DDFA-FFD");
    CHECK(text.find("0 to 30") != std::string::npos);
    CHECK(text.find("30 to 60") != std::string::npos);
    CHECK(text.find("60 to 90") != std::string::npos);
    CHECK(text.find("Mean") != std::string::npos);
    CHECK(text.find("3.51") != std::string::npos);
    CHECK(text.find("2.60") != std::string::npos);

    // Bin mean of means, not pooled mean.
    const std::vector<double> nmes = {0.01, 0.03, 0.05, 0.10};
    const std::vector<double> yaws = {5, 10, 45, 75};
    const auto tt = tabulate(nmes, yaws);
    CHECK(*tt.bins[0] == doctest::Approx(2.0));
    CHECK(*tt.bins[1] == doctest::Approx(5.0));
    CHECK(*tt.bins[2] == doctest::Approx(10.0));
    CHECK(tt.mean == doctest::Approx(17.0 / 3.0));
    CHECK(tt.counts == std::array<std::size_t, 3>{2, 1, 1});
}

TEST_CASE("empty bins are reported and excluded from the mean") {
    const std::vector<double> nmes = {0.02, 0.04};
    const std::vector<double> yaws = {10, 70};
    const auto t = tabulate(nmes, yaws);
    CHECK_FALSE(t.bins[1].has_value());
    CHECK(t.mean == doctest::Approx(3.0));
    CHECK_FALSE(t.warnings.empty());
    CHECK(format_table(t).find("n/a") != std::string::npos);
    CHECK_THROWS_AS(tabulate(std::vector<double>{}, std::vector<double>{}), DomainError);
}

TEST_CASE("out-of-range yaws are rejected together") {
    const std::vector<double> nmes = {0.02, 0.04, 0.01};
    const std::vector<double> yaws = {95, 10, -120};
    try {
        tabulate(nmes, yaws);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find('0') != std::string::npos);
        CHECK(msg.find('2') != std::string::npos);
    }
}

TEST_CASE("records tabulate through the same path") {
    std::vector<EvalRecord> recs = {shifted_record(3, 4, 100, 100, 12), shifted_record(6, 8, 100, 100, -40),
                                    shifted_record(0, 5, 100, 100, 88)};
    const auto t = bin_and_tabulate(recs);
    CHECK(*t.bins[0] == doctest::Approx(5.0));
    CHECK(*t.bins[1] == doctest::Approx(10.0));
    CHECK(*t.bins[2] == doctest::Approx(5.0));
    CHECK(t.mean == doctest::Approx(20.0 / 3.0));
}

TEST_CASE("balanced sampling") {
    std::vector<double> yaws;
    for (int i = 0; i < 90; ++i) yaws.push_back(double(i));
    const auto a = balanced_sample(yaws, 10, 7);
    const auto b = balanced_sample(yaws, 10, 7);
    const auto c = balanced_sample(yaws, 10, 8);
    CHECK(a == b);
    CHECK(a != c);
    REQUIRE(a.size() == 30);
    std::array<int, 3> per{};
    std::set<std::size_t> uniq(a.begin(), a.end());
    CHECK(uniq.size() == 30);
    for (auto i : a) per[yaw_bin(yaws[i])]++;
    CHECK(per == std::array<int, 3>{10, 10, 10});
    CHECK_THROWS_WITH_AS(balanced_sample(yaws, 31, 1), doctest::Contains("has 30 records"), DomainError);
}

TEST_CASE("kind comparison reports residuals without a verdict") {
    const auto face = make_synthetic_face(600);
    const Dims dims = {4, 6, 3};
    const auto pb = parameterize(face.mesh, build_lattice(face.mesh, dims, BasisKind::bspline(3)));
    const auto pz = parameterize(face.mesh, build_lattice(face.mesh, dims, BasisKind::bernstein()));
    Mesh t = face.mesh;
    for (auto& v : t.vertices) v.z() += 2.0 * std::exp(-v.squaredNorm() / 400.0);
    const std::vector<Mesh> targets = {t};
    const auto cmp = compare_kinds(pb, pz, targets, face.scheme);
    REQUIRE(cmp.targets.size() == 1);
    CHECK(cmp.bspline.mean_total_loss == doctest::Approx(cmp.targets[0].bspline.report.total));
    CHECK(cmp.targets[0].bernstein.surface_rmse == doctest::Approx(rmse(cmp.targets[0].bernstein.fitted.vertices, t.vertices)));
    const auto text = format_comparison(cmp);
    CHECK(text.find("3.86") != std::string::npos);
    CHECK(text.find("3.51") != std::string::npos);
    CHECK_THROWS_AS(compare_kinds(pz, pb, targets, face.scheme), DomainError);
}
