#include "ffd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ffd/error.hpp"
#include "ffd/kernels.hpp"

namespace ffd {

namespace {

struct SoaPoints {
    std::vector<double> x, y, z;

    explicit SoaPoints(std::size_t n) : x(n), y(n), z(n) {}
};

SoaPoints split(std::span<const Vec3> pts, std::span<const Vec3> offset = {}) {
    SoaPoints soa(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vec3 p = offset.empty() ? pts[i] : Vec3(pts[i] + offset[i]);
        soa.x[i] = p.x();
        soa.y[i] = p.y();
        soa.z[i] = p.z();
    }
    return soa;
}

// Solves sum_i B_i(s) * (i / divisions) = target for s in [0, 1].
double invert_axis(const AxisBasis& basis, double target, double tol, int max_iter,
                   std::size_t vertex, std::vector<double>& vals, std::vector<double>& ders) {
    const double denom = double(basis.function_count() - 1);
    auto eval = [&](double s, double& g, double& dg) {
        auto first = basis.evaluate(s, vals, ders);
        g = 0.0;
        dg = 0.0;
        for (std::size_t k = 0; k < basis.support_width(); ++k) {
            const double node = double(first + k) / denom;
            g += vals[k] * node;
            dg += ders[k] * node;
        }
    };

    double lo = 0.0, hi = 1.0;
    double s = std::clamp(target, 0.0, 1.0);
    double g = 0.0, dg = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        eval(s, g, dg);
        const double r = g - target;
        // Keep polishing a little past tol; Newton converges quadratically here.
        if (std::abs(r) <= tol * 1e-3) return s;
        if (r < 0.0) lo = s; else hi = s;
        double next = dg > 0.0 ? s - r / dg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s) return s;
        s = next;
    }
    eval(s, g, dg);
    if (std::abs(g - target) > tol) {
        throw ConvergenceError("parameterization did not converge at vertex " +
                                   std::to_string(vertex) + " (residual " +
                                   std::to_string(std::abs(g - target)) + ")",
                               vertex, std::abs(g - target));
    }
    return s;
}

}  // namespace

void LatticeConfig::validate() const {
    std::array<bool, 3> used{};
    for (int a = 0; a < 3; ++a) {
        if (axis_map[a] < 0 || axis_map[a] > 2 || used[axis_map[a]]) {
            throw DomainError("axis_map must be a permutation of x, y, z");
        }
        used[axis_map[a]] = true;
        if (dims[a] < 1) throw DomainError("lattice dims must be positive");
        if (kind.is_bspline() && dims[a] < kind.degree) {
            throw DomainError("dims must be >= degree (axis " + std::to_string(a) + " has " +
                              std::to_string(dims[a]) + " divisions, degree " +
                              std::to_string(kind.degree) + ")");
        }
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw DomainError("lattice box lengths must be positive and finite");
        }
    }
    if (kind.is_bspline() && kind.degree < 1) throw DomainError("B-spline degree must be >= 1");
}

Vec3 ControlGrid::node(const LatticeConfig& cfg, std::size_t i, std::size_t j, std::size_t k) {
    const std::array<double, 3> frac = {double(i) / cfg.dims[0], double(j) / cfg.dims[1],
                                        double(k) / cfg.dims[2]};
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
        const int w = cfg.axis_map[a];
        p[w] = cfg.origin[w] + frac[a] * cfg.lengths[w];
    }
    return p;
}

ControlGrid ControlGrid::uniform(const LatticeConfig& cfg) {
    cfg.validate();
    ControlGrid grid{cfg, {}};
    grid.points.reserve(cfg.control_point_count());
    for (int i = 0; i <= cfg.dims[0]; ++i)
        for (int j = 0; j <= cfg.dims[1]; ++j)
            for (int k = 0; k <= cfg.dims[2]; ++k) grid.points.push_back(node(cfg, i, j, k));
    return grid;
}

void DeformationField::check(std::size_t m) const {
    if (delta.size() != m) {
        throw DimensionError("deformation field has " + std::to_string(delta.size()) +
                             " entries, lattice has " + std::to_string(m) + " control points");
    }
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!delta[i].allFinite()) {
            throw DomainError("deformation entry " + std::to_string(i) + " is not finite");
        }
    }
}

void CoefficientMatrix::append_row(const SparseRow& row) {
    if (dense_) {
        if (row.vals.size() != cols_) throw DimensionError("dense coefficient row has wrong width");
    } else {
        col_.insert(col_.end(), row.cols.begin(), row.cols.end());
    }
    vals_.insert(vals_.end(), row.vals.begin(), row.vals.end());
    row_ptr_.push_back(vals_.size());
}

void CoefficientMatrix::reserve(std::size_t rows, std::size_t nnz_per_row) {
    row_ptr_.reserve(rows + 1);
    vals_.reserve(rows * nnz_per_row);
    if (!dense_) col_.reserve(rows * nnz_per_row);
}

std::vector<std::uint32_t> CoefficientMatrix::row_columns(std::size_t r) const {
    std::vector<std::uint32_t> out;
    if (dense_) {
        out.resize(cols_);
        for (std::size_t c = 0; c < cols_; ++c) out[c] = std::uint32_t(c);
    } else {
        out.assign(col_.begin() + std::ptrdiff_t(row_ptr_[r]),
                   col_.begin() + std::ptrdiff_t(row_ptr_[r + 1]));
    }
    return out;
}

void CoefficientMatrix::multiply(std::span<const Vec3> points, std::span<Vec3> out) const {
    if (points.size() != cols_ || out.size() != rows()) {
        throw DimensionError("coefficient multiply: size mismatch");
    }
    const auto soa = split(points);
    static_assert(sizeof(Vec3) == 3 * sizeof(double));
    double* dst = out.empty() ? nullptr : out.front().data();
    const auto& k = kernels::active();
    if (dense_) {
        k.dense_rows_dot3(vals_.data(), rows(), cols_, soa.x.data(), soa.y.data(), soa.z.data(), dst);
    } else {
        k.sparse_rows_dot3(row_ptr_.data(), col_.data(), vals_.data(), rows(), soa.x.data(),
                           soa.y.data(), soa.z.data(), dst);
    }
}

void CoefficientMatrix::transpose_multiply(std::span<const double> weights,
                                           std::span<const Vec3> rhs, std::span<Vec3> out) const {
    if (rhs.size() != rows() || out.size() != cols_ ||
        (!weights.empty() && weights.size() != rows())) {
        throw DimensionError("coefficient transpose multiply: size mismatch");
    }
    for (std::size_t r = 0; r < rows(); ++r) {
        const double w = weights.empty() ? 1.0 : weights[r];
        if (w == 0.0) continue;
        const Vec3 v = w * rhs[r];
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const std::size_t c = dense_ ? k - row_ptr_[r] : col_[k];
            out[c] += vals_[k] * v;
        }
    }
}

ControlGrid build_lattice(const Mesh& mesh, const Dims& dims, BasisKind kind, double padding,
                          const AxisMap& axis_map) {
    if (!(padding >= 0.0)) throw DomainError("padding must be >= 0");
    const Box3 box = bounding_box(mesh);
    const Vec3 extent = box.extent();
    for (int a = 0; a < 3; ++a) {
        if (!(extent[a] > 0.0)) {
            throw DegenerateError("mesh bounding box has zero extent along axis " +
                                  std::to_string(a));
        }
    }
    LatticeConfig cfg;
    cfg.dims = dims;
    cfg.kind = kind;
    cfg.axis_map = axis_map;
    cfg.origin = box.min - padding * extent;
    cfg.lengths = extent * (1.0 + 2.0 * padding);
    return ControlGrid::uniform(cfg);
}

ParameterizedMesh assemble(Mesh mesh, ControlGrid grid, std::vector<Vec3> params) {
    const auto& cfg = grid.config;
    if (params.size() != mesh.size()) throw DimensionError("parameter count != vertex count");
    if (grid.points.size() != cfg.control_point_count()) {
        throw DimensionError("control grid size does not match its dims");
    }
    const TensorBasis basis(cfg.dims, cfg.kind);
    const bool dense = !cfg.kind.is_bspline();
    CoefficientMatrix coeffs(cfg.control_point_count(), dense);
    std::size_t width = 1;
    for (int a = 0; a < 3; ++a) width *= basis.axis(a).support_width();
    coeffs.reserve(mesh.size(), width);

    SparseRow row;
    for (const auto& stu : params) {
        basis.row(stu, row);
        coeffs.append_row(row);
    }

    ParameterizedMesh pm{std::move(mesh), std::move(params), std::move(coeffs), std::move(grid), 0.0};
    std::vector<Vec3> rebuilt(pm.mesh.size());
    pm.coeffs.multiply(pm.grid.points, rebuilt);
    for (std::size_t q = 0; q < rebuilt.size(); ++q) {
        pm.max_residual =
            std::max(pm.max_residual, (rebuilt[q] - pm.mesh.vertices[q]).cwiseAbs().maxCoeff());
    }
    return pm;
}

ParameterizedMesh parameterize(const Mesh& mesh, const ControlGrid& grid,
                               const ParameterizeOptions& opts) {
    mesh.validate();
    const auto& cfg = grid.config;
    cfg.validate();
    const TensorBasis basis(cfg.dims, cfg.kind);

    std::vector<Vec3> params(mesh.size());
    std::vector<double> vals, ders;
    for (std::size_t q = 0; q < mesh.size(); ++q) {
        for (int a = 0; a < 3; ++a) {
            const int w = cfg.axis_map[a];
            const double rel = (mesh.vertices[q][w] - cfg.origin[w]) / cfg.lengths[w];
            // Allow rounding-level spill past the faces of a zero-padding box.
            if (rel < -1e-12 || rel > 1.0 + 1e-12 || !std::isfinite(rel)) {
                throw DomainError("vertex " + std::to_string(q) + " lies outside the lattice box");
            }
            const auto& ab = basis.axis(a);
            vals.resize(ab.support_width());
            ders.resize(ab.support_width());
            params[q][a] = invert_axis(ab, std::clamp(rel, 0.0, 1.0), opts.tol, opts.max_iter, q,
                                       vals, ders);
        }
    }
    return assemble(mesh, grid, std::move(params));
}

std::vector<Vec3> deformed_vertices(const ParameterizedMesh& pm, std::span<const Vec3> delta) {
    const auto m = pm.control_point_count();
    if (delta.size() != m) {
        throw DimensionError("deformation field has " + std::to_string(delta.size()) +
                             " entries, lattice has " + std::to_string(m));
    }
    std::vector<Vec3> moved(m);
    for (std::size_t i = 0; i < m; ++i) moved[i] = pm.grid.points[i] + delta[i];
    std::vector<Vec3> out(pm.mesh.size());
    pm.coeffs.multiply(moved, out);
    return out;
}

Mesh deform(const ParameterizedMesh& pm, const DeformationField& field) {
    field.check(pm.control_point_count());
    return Mesh{deformed_vertices(pm, field.delta), pm.mesh.faces};
}

std::vector<std::uint32_t> support_mask(const ParameterizedMesh& pm, std::size_t flat) {
    if (flat >= pm.control_point_count()) {
        throw IndexError("control point " + std::to_string(flat) + " out of range");
    }
    std::vector<std::uint32_t> out;
    const auto& c = pm.coeffs;
    for (std::size_t r = 0; r < c.rows(); ++r) {
        const auto vals = c.row_values(r);
        if (c.dense()) {
            if (vals[flat] != 0.0) out.push_back(std::uint32_t(r));
            continue;
        }
        const auto begin = c.col_index().begin() + std::ptrdiff_t(c.row_ptr()[r]);
        const auto end = c.col_index().begin() + std::ptrdiff_t(c.row_ptr()[r + 1]);
        auto it = std::lower_bound(begin, end, std::uint32_t(flat));
        if (it != end && *it == flat && vals[std::size_t(it - begin)] != 0.0) {
            out.push_back(std::uint32_t(r));
        }
    }
    return out;
}

}  // namespace ffd
