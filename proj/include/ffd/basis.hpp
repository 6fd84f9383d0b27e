#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ffd/mesh.hpp"

namespace ffd {

// Clamped knot vector over [0, 1]: the first and last degree+1 knots are 0 and
// 1, interior knots are nondecreasing. Spans are half-open [k_i, k_{i+1}) except
// the last non-empty span, which is closed at u = 1.
class KnotVector {
public:
    // Throws DomainError if the sequence is not a clamped [0,1] knot vector.
    KnotVector(int degree, std::vector<double> knots);

    static KnotVector clamped_uniform(std::size_t function_count, int degree);

    int degree() const noexcept { return degree_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    std::size_t function_count() const noexcept { return knots_.size() - degree_ - 1; }

    // Index s with knots[s] <= u < knots[s+1]; u = 1 maps to the last non-empty span.
    std::size_t find_span(double u) const;

private:
    int degree_;
    std::vector<double> knots_;
};

double bspline_basis(std::size_t i, double u, const KnotVector& kv);
double bspline_basis_derivative(std::size_t i, double u, const KnotVector& kv);

// The degree+1 basis values that can be nonzero on `span`, for functions
// span-degree .. span. `values` (and `derivs`, when non-empty) must hold degree+1.
void bspline_local_basis(std::size_t span, double u, const KnotVector& kv,
                         std::span<double> values, std::span<double> derivs = {});

double bernstein_basis(std::size_t i, std::size_t n, double u);
// All n+1 Bernstein values (and optionally derivatives) of degree n at u.
void bernstein_all(std::size_t n, double u, std::span<double> values,
                   std::span<double> derivs = {});

struct BasisKind {
    enum class Family : std::uint8_t { Bernstein, BSpline };

    Family family = Family::BSpline;
    int degree = 3;  // used by BSpline only; Bernstein degree is the axis division count

    static BasisKind bspline(int degree = 3) { return {Family::BSpline, degree}; }
    static BasisKind bernstein() { return {Family::Bernstein, 0}; }
    bool is_bspline() const noexcept { return family == Family::BSpline; }
    friend bool operator==(const BasisKind&, const BasisKind&) = default;
};

using Dims = std::array<int, 3>;

inline std::size_t control_point_count(const Dims& d) {
    return std::size_t(d[0] + 1) * std::size_t(d[1] + 1) * std::size_t(d[2] + 1);
}

// Flat control point index with k (the U axis) fastest.
inline std::size_t flat_index(const Dims& d, std::size_t i, std::size_t j, std::size_t k) {
    return (i * std::size_t(d[1] + 1) + j) * std::size_t(d[2] + 1) + k;
}

struct SparseRow {
    std::vector<std::uint32_t> cols;  // ascending
    std::vector<double> vals;
};

// 1D basis for one lattice axis: either a clamped-uniform B-spline with
// divisions+1 functions or Bernstein of degree `divisions`.
class AxisBasis {
public:
    AxisBasis(int divisions, BasisKind kind);

    std::size_t function_count() const noexcept { return count_; }
    const BasisKind& kind() const noexcept { return kind_; }
    const KnotVector* knots() const noexcept { return kind_.is_bspline() ? &kv_ : nullptr; }

    // First function index with a possibly nonzero value at u and how many
    // follow (degree+1 for B-spline, all for Bernstein); fills values/derivs.
    std::size_t evaluate(double u, std::span<double> values, std::span<double> derivs = {}) const;
    std::size_t support_width() const noexcept { return width_; }

private:
    BasisKind kind_;
    std::size_t count_;
    std::size_t width_;
    KnotVector kv_;
};

class TensorBasis {
public:
    TensorBasis(const Dims& dims, BasisKind kind);

    const Dims& dims() const noexcept { return dims_; }
    const AxisBasis& axis(int a) const { return axes_[a]; }
    std::size_t size() const noexcept { return control_point_count(dims_); }

    // Tensor-product coefficient row at (s,t,u). B-spline rows keep only
    // nonzero products; Bernstein rows are dense (every column present).
    SparseRow row(const Vec3& stu) const;
    void row(const Vec3& stu, SparseRow& out) const;

private:
    Dims dims_;
    BasisKind kind_;
    std::array<AxisBasis, 3> axes_;
};

SparseRow tensor_row(const Vec3& stu, const Dims& dims, BasisKind kind);

}  // namespace ffd
