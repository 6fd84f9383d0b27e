#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ffd/basis.hpp"
#include "ffd/mesh.hpp"

namespace ffd {

inline constexpr Dims kDefaultDims = {6, 19, 4};
inline constexpr double kDefaultPadding = 0.05;

// axis_map[a] is the world axis (0=x, 1=y, 2=z) carrying lattice axis a (S, T, U).
using AxisMap = std::array<int, 3>;
inline constexpr AxisMap kDefaultAxisMap = {0, 1, 2};

struct LatticeConfig {
    Dims dims = kDefaultDims;
    BasisKind kind = BasisKind::bspline(3);
    Vec3 origin = Vec3::Zero();    // world-space box corner
    Vec3 lengths = Vec3::Ones();   // world-space box extents, all > 0
    AxisMap axis_map = kDefaultAxisMap;

    std::size_t control_point_count() const { return ffd::control_point_count(dims); }
    double diagonal() const { return lengths.norm(); }

    // Throws DomainError on dims < degree, non-positive lengths or a bad axis map.
    void validate() const;
};

struct ControlGrid {
    LatticeConfig config;
    std::vector<Vec3> points;  // flat (i, j, k), k fastest

    // Undeformed position of lattice node (i, j, k).
    static Vec3 node(const LatticeConfig& cfg, std::size_t i, std::size_t j, std::size_t k);
    static ControlGrid uniform(const LatticeConfig& cfg);
};

struct DeformationField {
    std::vector<Vec3> delta;

    static DeformationField zero(std::size_t m) { return {std::vector<Vec3>(m, Vec3::Zero())}; }
    static DeformationField constant(std::size_t m, const Vec3& c) {
        return {std::vector<Vec3>(m, c)};
    }
    // Throws DimensionError when size != m or DomainError on a non-finite entry.
    void check(std::size_t m) const;
};

// Row-compressed N x M coefficient matrix. Dense storage keeps every column of
// every row (col is left empty and the column index is implicit).
class CoefficientMatrix {
public:
    CoefficientMatrix() = default;
    CoefficientMatrix(std::size_t cols, bool dense) : cols_(cols), dense_(dense) {}

    void append_row(const SparseRow& row);
    void reserve(std::size_t rows, std::size_t nnz_per_row);

    std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
    std::size_t cols() const noexcept { return cols_; }
    bool dense() const noexcept { return dense_; }
    std::size_t nonzeros() const noexcept { return vals_.size(); }

    std::span<const double> row_values(std::size_t r) const {
        return {vals_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    // Column indices of row r (materialized 0..M-1 for dense rows).
    std::vector<std::uint32_t> row_columns(std::size_t r) const;

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::uint32_t>& col_index() const noexcept { return col_; }
    const std::vector<double>& values() const noexcept { return vals_; }

    // out (rows x 3, interleaved) = C * points, through the active kernel table.
    void multiply(std::span<const Vec3> points, std::span<Vec3> out) const;
    // out (cols) += C^T diag(weights) rhs, rhs rows x 3.
    void transpose_multiply(std::span<const double> weights, std::span<const Vec3> rhs,
                            std::span<Vec3> out) const;

private:
    std::size_t cols_ = 0;
    bool dense_ = false;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    std::vector<double> vals_;
};

struct ParameterizedMesh {
    Mesh mesh;
    std::vector<Vec3> params;  // (s, t, u) per vertex
    CoefficientMatrix coeffs;
    ControlGrid grid;
    double max_residual = 0.0;  // max_q |coeffs * P0 - V0|_inf

    std::size_t control_point_count() const { return grid.points.size(); }
};

struct ParameterizeOptions {
    double tol = 1e-10;  // relative to axis length
    int max_iter = 50;
};

// Box = bounding box inflated by `padding` (fraction of extent) on every side.
ControlGrid build_lattice(const Mesh& mesh, const Dims& dims, BasisKind kind,
                          double padding = kDefaultPadding,
                          const AxisMap& axis_map = kDefaultAxisMap);

// Inverts the volume map for every vertex. The undeformed lattice is a tensor
// grid, so each axis is an independent monotone 1D spline inversion (Newton
// with a bisection safeguard); the coupled 3D residual is checked afterwards.
ParameterizedMesh parameterize(const Mesh& mesh, const ControlGrid& grid,
                               const ParameterizeOptions& opts = {});

// Rebuilds coefficients from stored parameters (used when loading from disk).
ParameterizedMesh assemble(Mesh mesh, ControlGrid grid, std::vector<Vec3> params);

Mesh deform(const ParameterizedMesh& pm, const DeformationField& field);
std::vector<Vec3> deformed_vertices(const ParameterizedMesh& pm, std::span<const Vec3> delta);

// Vertices whose coefficient for control point `flat` is nonzero, ascending.
std::vector<std::uint32_t> support_mask(const ParameterizedMesh& pm, std::size_t flat);

}  // namespace ffd
