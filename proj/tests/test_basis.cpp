#include <doctest.h>

#include <random>

#include "ffd/basis.hpp"
#include "ffd/error.hpp"
#include "oracles.hpp"

using namespace ffd;

TEST_CASE("knot vectors") {
    const auto kv = KnotVector::clamped_uniform(7, 3);
    CHECK(kv.knots().size() == 11);
    CHECK(kv.function_count() == 7);
    CHECK(kv.find_span(0.0) == 3);
    CHECK(kv.find_span(1.0) == 6);
    CHECK(kv.find_span(0.25) == 4);  // knots at 0, 1/4, 1/2, 3/4, 1
    CHECK(kv.find_span(0.2499999) == 3);
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0.5, 1, 1, 1}), DomainError);    // not clamped at 0
    CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.7, 0.3, 1, 1}), DomainError);  // decreasing
}

TEST_CASE("B-spline values match Cox-de Boor in long double") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int p = 0; p <= 4; ++p) {
        for (int count : {p + 1, p + 2, 7, 12}) {
            const auto kv = KnotVector::clamped_uniform(count, p);
            const auto ok = oracle::clamped_knots(count, p);
            std::vector<double> us = {0.0, 1.0, 0.5};
            for (int s = 0; s < 40; ++s) us.push_back(uni(rng));
            for (std::size_t k = 0; k < kv.knots().size(); ++k) us.push_back(kv.knots()[k]);
            for (double u : us) {
                double sum = 0.0;
                for (int i = 0; i < count; ++i) {
                    const double got = bspline_basis(i, u, kv);
                    CHECK(std::abs(got - (double)oracle::cox_de_boor(i, p, u, ok)) <= 1e-13);
                    sum += got;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-13);
            }
        }
    }
}

TEST_CASE("B-spline derivatives match central differences") {
    const auto kv = KnotVector::clamped_uniform(8, 3);
    const double h = 1e-6;
    for (double u : {0.05, 0.31, 0.5001, 0.77, 0.93}) {
        for (int i = 0; i < 8; ++i) {
            const double fd = (bspline_basis(i, u + h, kv) - bspline_basis(i, u - h, kv)) / (2 * h);
            CHECK(bspline_basis_derivative(i, u, kv) == doctest::Approx(fd).epsilon(1e-6).scale(1));
        }
    }
}

TEST_CASE("local basis agrees with the per-function evaluation") {
    const auto kv = KnotVector::clamped_uniform(10, 3);
    std::vector<double> vals(4), ders(4);
    for (double u : {0.0, 0.1, 0.42857, 0.999, 1.0}) {
        const auto span = kv.find_span(u);
        bspline_local_basis(span, u, kv, vals, ders);
        for (int r = 0; r <= 3; ++r) {
            CHECK(vals[r] == doctest::Approx(bspline_basis(span - 3 + r, u, kv)).epsilon(1e-14));
            CHECK(ders[r] == doctest::Approx(bspline_basis_derivative(span - 3 + r, u, kv)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Bernstein values and derivatives") {
    for (int n : {1, 3, 6, 19}) {
        std::vector<double> v(n + 1), d(n + 1);
        for (double u : {0.0, 0.2, 0.5, 0.81, 1.0}) {
            bernstein_all(n, u, v, d);
            double sum = 0.0;
            for (int i = 0; i <= n; ++i) {
                CHECK(std::abs(v[i] - (double)oracle::bernstein(i, n, u)) <= 1e-14);
                CHECK(std::abs(bernstein_basis(i, n, u) - v[i]) <= 1e-14);
                // d/du B_{i,n} = n (B_{i-1,n-1} - B_{i,n-1})
                const long double lo = i > 0 ? oracle::bernstein(i - 1, n - 1, u) : 0.0L;
                const long double hi = i < n ? oracle::bernstein(i, n - 1, u) : 0.0L;
                CHECK(std::abs(d[i] - (double)(n * (lo - hi))) <= 1e-11);
                sum += v[i];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-13);
        }
    }
}

TEST_CASE("axis basis rejects too few divisions") {
    CHECK_THROWS_WITH_AS(AxisBasis(2, BasisKind::bspline(3)), doctest::Contains("dims must be"),
                         DomainError);
    CHECK_NOTHROW(AxisBasis(3, BasisKind::bspline(3)));
    CHECK_NOTHROW(AxisBasis(1, BasisKind::bernstein()));
}

TEST_CASE("tensor rows match the dense oracle row") {
    const Dims dims = {6, 19, 4};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto kind : {BasisKind::bspline(3), BasisKind::bernstein(), BasisKind::bspline(2)}) {
        const TensorBasis tb(dims, kind);
        for (int s = 0; s < 30; ++s) {
            const Vec3 stu(uni(rng), uni(rng), uni(rng));
            const auto row = tb.row(stu);
            const auto ref = oracle::dense_row(dims, kind.is_bspline(), kind.degree, stu);
            std::vector<double> dense(ref.size(), 0.0);
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                if (k) CHECK(row.cols[k] > row.cols[k - 1]);
                dense[row.cols[k]] = row.vals[k];
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < ref.size(); ++c) {
                CHECK(std::abs(dense[c] - (double)ref[c]) <= 1e-14);
                sum += dense[c];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            if (kind == BasisKind::bspline(3)) CHECK(row.cols.size() <= 64);
            if (!kind.is_bspline()) CHECK(row.cols.size() == 700);
        }
    }
}

TEST_CASE("flat index puts the U axis fastest") {
    const Dims d = {6, 19, 4};
    CHECK(control_point_count(d) == 700);
    CHECK(flat_index(d, 0, 0, 1) == 1);
    CHECK(flat_index(d, 0, 1, 0) == 5);
    CHECK(flat_index(d, 1, 0, 0) == 100);
    CHECK(flat_index(d, 6, 19, 4) == 699);
}
