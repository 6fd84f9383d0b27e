#include <doctest.h>

#include <random>

#include <Eigen/LU>

#include "ffd/error.hpp"
#include "ffd/pose.hpp"
#include "oracles.hpp"

using namespace ffd;

TEST_CASE("apply, inverse and compose") {
    std::mt19937_64 rng(4);
    Pose a{1.3, oracle::random_rotation(rng), Vec3(1, 2, 3)};
    Pose b{0.7, oracle::random_rotation(rng), Vec3(-5, 0, 2)};
    const Vec3 p(0.3, -8, 11);
    CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
    CHECK((a.compose(b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
    const Mat34 m = a.as_matrix();
    CHECK((m.leftCols<3>() * p + m.col(3) - a.apply(p)).norm() < 1e-12);
    CHECK_NOTHROW(a.validate());
    Pose bad = a;
    bad.rotation(0, 0) += 1e-6;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = a;
    bad.rotation.col(0) *= -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = a;
    bad.scale = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("from_matrix recovers exact poses and projects noisy ones") {
    std::mt19937_64 rng(8);
    const Pose p{2.5, oracle::random_rotation(rng), Vec3(4, -1, 0.5)};
    const Pose q = Pose::from_matrix(p.as_matrix());
    CHECK(q.scale == doctest::Approx(p.scale).epsilon(1e-14));
    CHECK((q.rotation - p.rotation).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.translation == p.translation);

    Mat34 noisy = p.as_matrix();
    noisy(0, 1) += 0.01;
    const Pose r = Pose::from_matrix(noisy);
    CHECK_NOTHROW(r.validate());
    CHECK(r.scale == doctest::Approx(2.5).epsilon(0.01));
}

TEST_CASE("similarity estimation is exact on noiseless data") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> src(30);
        for (auto& v : src) v = Vec3(g(rng), g(rng), g(rng));
        const Pose truth{0.5 + trial * 0.1, oracle::random_rotation(rng), Vec3(g(rng), g(rng), g(rng))};
        const auto dst = apply_pose(src, truth);
        const Pose est = estimate_pose(src, dst);
        CHECK(std::abs(est.scale - truth.scale) < 1e-11);
        CHECK((est.rotation - truth.rotation).cwiseAbs().maxCoeff() < 1e-11);
        CHECK((est.translation - truth.translation).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("weighted estimation ignores zero-weight outliers") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 10.0);
    std::vector<Vec3> src(20);
    for (auto& v : src) v = Vec3(g(rng), g(rng), g(rng));
    const Pose truth{1.7, oracle::random_rotation(rng), Vec3(1, 2, 3)};
    auto dst = apply_pose(src, truth);
    std::vector<double> w(20, 1.0);
    dst[3] += Vec3(100, 0, 0);
    w[3] = 0.0;
    const Pose est = estimate_pose(src, dst, w);
    CHECK(std::abs(est.scale - 1.7) < 1e-12);
    CHECK((est.translation - truth.translation).norm() < 1e-10);
}

TEST_CASE("estimation never returns a reflection and rejects degenerate input") {
    std::vector<Vec3> src = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    std::vector<Vec3> mirrored;
    for (const auto& v : src) mirrored.emplace_back(-v.x(), v.y(), v.z());
    const Pose est = estimate_pose(src, mirrored);
    CHECK(est.rotation.determinant() == doctest::Approx(1.0));
    CHECK_THROWS_AS(estimate_pose(std::vector<Vec3>(src.begin(), src.begin() + 2),
                                  std::vector<Vec3>(src.begin(), src.begin() + 2)),
                    DegenerateError);
    std::vector<Vec3> line = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
    CHECK_THROWS_AS(estimate_pose(line, line), DegenerateError);
}

TEST_CASE("Euler angles round trip and yaw convention") {
    for (double yaw : {-80.0, -30.0, 0.0, 15.0, 59.9, 89.0})
        for (double pitch : {-40.0, 0.0, 25.0})
            for (double roll : {-10.0, 0.0, 33.0}) {
                const auto e = euler_angles(rotation_from_euler(yaw, pitch, roll));
                CHECK(e.yaw == doctest::Approx(yaw).epsilon(1e-10).scale(1));
                CHECK(e.pitch == doctest::Approx(pitch).epsilon(1e-10).scale(1));
                CHECK(e.roll == doctest::Approx(roll).epsilon(1e-10).scale(1));
                CHECK_FALSE(e.gimbal_lock);
            }
    // Positive yaw turns +z toward +x.
    const Vec3 fwd = rotation_from_euler(30, 0, 0) * Vec3::UnitZ();
    CHECK(fwd.x() == doctest::Approx(0.5));
    Pose p;
    p.rotation = rotation_from_euler(45, 0, 0);
    CHECK(yaw_degrees(p) == doctest::Approx(45));
    p.rotation = rotation_from_euler(10, 90, 0);
    CHECK(euler_angles(p.rotation).gimbal_lock);
    CHECK_THROWS_AS(yaw_degrees(p), DomainError);
}
