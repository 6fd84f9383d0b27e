#include <doctest.h>

#include <random>

#include "ffd/error.hpp"
#include "ffd/lattice.hpp"
#include "ffd/sample_face.hpp"
#include "oracles.hpp"

using namespace ffd;

namespace {

const SyntheticFace& small_face() {
    static const SyntheticFace f = make_synthetic_face(3000);
    return f;
}

std::vector<Vec3> random_delta(std::mt19937_64& rng, std::size_t m, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    std::vector<Vec3> d(m);
    for (auto& v : d) v = Vec3(u(rng), u(rng), u(rng));
    return d;
}

}  // namespace

TEST_CASE("lattice box is the padded bounding box") {
    const auto& mesh = small_face().mesh;
    const auto bb = bounding_box(mesh);
    const auto grid = build_lattice(mesh, kDefaultDims, BasisKind::bspline(3), 0.05);
    const Vec3 ext = bb.extent();
    for (int a = 0; a < 3; ++a) {
        CHECK(grid.config.origin[a] == doctest::Approx(bb.min[a] - 0.05 * ext[a]));
        CHECK(grid.config.lengths[a] == doctest::Approx(1.1 * ext[a]));
    }
    CHECK(grid.points.size() == 700);
    CHECK(grid.points[flat_index(kDefaultDims, 0, 0, 0)] == grid.config.origin);
    const Vec3 far = grid.config.origin + grid.config.lengths;
    CHECK((grid.points[699] - far).norm() < 1e-12);
    CHECK(grid.points[flat_index(kDefaultDims, 0, 1, 0)].y() ==
          doctest::Approx(grid.config.origin.y() + grid.config.lengths.y() / 19));
}

TEST_CASE("lattice construction errors") {
    Mesh flat;
    flat.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    CHECK_THROWS_AS(build_lattice(flat, kDefaultDims, BasisKind::bspline(3)), DegenerateError);
    CHECK_THROWS_WITH(build_lattice(small_face().mesh, {1, 1, 1}, BasisKind::bspline(3)),
                      doctest::Contains("dims must be >= degree"));
    CHECK_NOTHROW(build_lattice(small_face().mesh, {1, 1, 1}, BasisKind::bernstein()));
}

TEST_CASE("parameterization reproduces every vertex") {
    const auto& mesh = small_face().mesh;
    for (auto kind : {BasisKind::bspline(3), BasisKind::bernstein(), BasisKind::bspline(2)}) {
        const auto grid = build_lattice(mesh, kDefaultDims, kind);
        const auto pm = parameterize(mesh, grid);
        const double diag = grid.config.diagonal();
        CHECK(pm.max_residual <= 1e-10 * diag);
        // Independent check of a few rows against the dense oracle.
        for (std::size_t q = 0; q < mesh.size(); q += 397) {
            const auto row = oracle::dense_row(kDefaultDims, kind.is_bspline(), kind.degree, pm.params[q]);
            const auto x = oracle::dense_eval(row, grid.points);
            for (int d = 0; d < 3; ++d) CHECK(std::abs((double)x[d] - mesh.vertices[q][d]) <= 1e-10 * diag);
        }
    }
}

TEST_CASE("vertex outside the box is rejected") {
    const auto& mesh = small_face().mesh;
    const auto grid = build_lattice(mesh, kDefaultDims, BasisKind::bspline(3));
    Mesh moved = mesh;
    moved.vertices[5].x() = grid.config.origin.x() - 1.0;
    CHECK_THROWS_AS(parameterize(moved, grid), DomainError);
}

TEST_CASE("axis map permutes lattice axes") {
    const auto& mesh = small_face().mesh;
    const AxisMap map = {1, 2, 0};  // S->y, T->z, U->x
    const auto grid = build_lattice(mesh, {5, 4, 6}, BasisKind::bspline(3), 0.05, map);
    const auto pm = parameterize(mesh, grid);
    CHECK(pm.max_residual <= 1e-10 * grid.config.diagonal());
    // Moving the S = 1 face of the lattice (world y max) by +z lifts only the top of the face.
    std::vector<Vec3> d(grid.points.size(), Vec3::Zero());
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; k <= 6; ++k) d[flat_index(grid.config.dims, 5, j, k)] = Vec3(0, 0, 1);
    const auto v = deformed_vertices(pm, d);
    std::size_t top = 0;
    for (std::size_t q = 0; q < mesh.size(); ++q) {
        if (pm.params[q].x() > 0.9 && v[q].z() > pm.mesh.vertices[q].z()) ++top;
        if (pm.params[q].x() < 0.3) CHECK(v[q].z() == doctest::Approx(pm.mesh.vertices[q].z()).epsilon(1e-9));
    }
    CHECK(top > 0);
}

TEST_CASE("deform: zero, constant and affine fields") {
    const auto& mesh = small_face().mesh;
    std::mt19937_64 rng(5);
    for (auto kind : {BasisKind::bspline(3), BasisKind::bernstein()}) {
        const auto pm = parameterize(mesh, build_lattice(mesh, kDefaultDims, kind));
        const auto m = pm.control_point_count();
        const double diag = pm.grid.config.diagonal();

        const auto z = deform(pm, DeformationField::zero(m));
        CHECK(z.faces == mesh.faces);
        CHECK(oracle::max_abs_diff(z.vertices, mesh.vertices) <= pm.max_residual + 1e-12);

        const Vec3 c(3.5, -1.25, 0.75);
        const auto t = deform(pm, DeformationField::constant(m, c));
        for (std::size_t q = 0; q < mesh.size(); ++q) CHECK((t.vertices[q] - z.vertices[q] - c).cwiseAbs().maxCoeff() <= 1e-12);

        Eigen::Matrix3d a = Eigen::Matrix3d::Identity() + 0.2 * Eigen::Matrix3d::Random();
        const Vec3 b(10, -4, 2);
        std::vector<Vec3> d(m);
        for (std::size_t i = 0; i < m; ++i) d[i] = a * pm.grid.points[i] + b - pm.grid.points[i];
        const auto af = deform(pm, {d});
        for (std::size_t q = 0; q < mesh.size(); ++q)
            CHECK((af.vertices[q] - (a * mesh.vertices[q] + b)).cwiseAbs().maxCoeff() <= 1e-9 * diag);

        CHECK_THROWS_AS(deform(pm, DeformationField::zero(m - 1)), DimensionError);
        auto bad = DeformationField::zero(m);
        bad.delta[3].x() = std::nan("");
        CHECK_THROWS_AS(deform(pm, bad), DomainError);
        (void)rng;
    }
}

TEST_CASE("deform is linear in delta") {
    const auto& mesh = small_face().mesh;
    const auto pm = parameterize(mesh, build_lattice(mesh, kDefaultDims, BasisKind::bspline(3)));
    std::mt19937_64 rng(9);
    const auto d1 = random_delta(rng, 700, 2.0), d2 = random_delta(rng, 700, 2.0);
    std::vector<Vec3> sum(700);
    for (std::size_t i = 0; i < 700; ++i) sum[i] = 0.5 * d1[i] - 2.0 * d2[i];
    const auto v0 = deformed_vertices(pm, DeformationField::zero(700).delta);
    const auto v1 = deformed_vertices(pm, d1), v2 = deformed_vertices(pm, d2);
    const auto vs = deformed_vertices(pm, sum);
    for (std::size_t q = 0; q < mesh.size(); ++q) {
        const Vec3 expect = v0[q] + 0.5 * (v1[q] - v0[q]) - 2.0 * (v2[q] - v0[q]);
        CHECK((vs[q] - expect).cwiseAbs().maxCoeff() <= 1e-11);
    }
}

TEST_CASE("support mask matches a brute-force scan and bounds locality") {
    const auto& mesh = small_face().mesh;
    const auto pm = parameterize(mesh, build_lattice(mesh, kDefaultDims, BasisKind::bspline(3)));
    const TensorBasis tb(kDefaultDims, BasisKind::bspline(3));
    std::mt19937_64 rng(1);
    for (std::size_t flat : {std::size_t(0), std::size_t(137), std::size_t(352), std::size_t(699)}) {
        std::vector<std::uint32_t> brute;
        for (std::size_t q = 0; q < mesh.size(); ++q) {
            const auto row = tb.row(pm.params[q]);
            for (std::size_t k = 0; k < row.cols.size(); ++k)
                if (row.cols[k] == flat && row.vals[k] != 0.0) brute.push_back(std::uint32_t(q));
        }
        CHECK(support_mask(pm, flat) == brute);

        std::vector<Vec3> d(700, Vec3::Zero());
        const auto before = deformed_vertices(pm, d);
        d[flat] = Vec3(1.5, -2.0, 0.5);
        const auto after = deformed_vertices(pm, d);
        std::vector<bool> in(mesh.size(), false);
        for (auto q : brute) in[q] = true;
        for (std::size_t q = 0; q < mesh.size(); ++q) {
            if (!in[q]) CHECK(after[q] == before[q]);
        }
    }
    CHECK_THROWS_AS(support_mask(pm, 700), IndexError);
}

TEST_CASE("assemble from stored parameters reproduces the coefficients") {
    const auto& mesh = small_face().mesh;
    const auto pm = parameterize(mesh, build_lattice(mesh, kDefaultDims, BasisKind::bspline(3)));
    const auto again = assemble(pm.mesh, pm.grid, pm.params);
    CHECK(again.coeffs.values() == pm.coeffs.values());
    CHECK(again.coeffs.col_index() == pm.coeffs.col_index());
    CHECK(again.max_residual == pm.max_residual);
}

TEST_CASE("transpose multiply is the adjoint of multiply") {
    const auto& mesh = small_face().mesh;
    for (auto kind : {BasisKind::bspline(3), BasisKind::bernstein()}) {
        const auto pm = parameterize(mesh, build_lattice(mesh, {4, 5, 3}, kind));
        std::mt19937_64 rng(2);
        const auto x = random_delta(rng, pm.control_point_count(), 1.0);
        const auto y = random_delta(rng, mesh.size(), 1.0);
        std::vector<double> w(mesh.size());
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& e : w) e = u(rng);
        std::vector<Vec3> ax(mesh.size());
        pm.coeffs.multiply(x, ax);
        std::vector<Vec3> aty(x.size(), Vec3::Zero());
        pm.coeffs.transpose_multiply(w, y, aty);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t q = 0; q < y.size(); ++q) lhs += w[q] * ax[q].dot(y[q]);
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i].dot(aty[i]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}
