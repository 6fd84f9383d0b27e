#include "ffd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ffd/error.hpp"

namespace ffd {

namespace {

void check_parameter(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("basis parameter " + std::to_string(u) + " outside [0, 1]");
    }
}

double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t j = 1; j <= k; ++j) c = c * double(n - k + j) / double(j);
    return c;
}

}  // namespace

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 0) throw DomainError("negative B-spline degree");
    const auto p = std::size_t(degree_);
    if (knots_.size() < 2 * (p + 1)) {
        throw DomainError("knot vector too short for degree " + std::to_string(degree_));
    }
    for (std::size_t i = 0; i <= p; ++i) {
        if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
            throw DomainError("knot vector must be clamped to [0, 1]");
        }
    }
    if (!std::is_sorted(knots_.begin(), knots_.end())) {
        throw DomainError("knot vector must be nondecreasing");
    }
}

KnotVector KnotVector::clamped_uniform(std::size_t function_count, int degree) {
    const auto p = std::size_t(std::max(degree, 0));
    if (function_count < p + 1) {
        throw DomainError("need at least degree+1 basis functions");
    }
    std::vector<double> knots(p + 1, 0.0);
    const std::size_t segments = function_count - p;
    for (std::size_t j = 1; j < segments; ++j) knots.push_back(double(j) / double(segments));
    knots.insert(knots.end(), p + 1, 1.0);
    return KnotVector(degree, std::move(knots));
}

std::size_t KnotVector::find_span(double u) const {
    check_parameter(u);
    const std::size_t n = function_count() - 1;
    if (u >= knots_[n + 1]) return n;
    // Largest s with knots[s] <= u, searched among [degree, n].
    auto first = knots_.begin() + degree_;
    auto last = knots_.begin() + static_cast<std::ptrdiff_t>(n + 1);
    auto it = std::upper_bound(first, last, u);
    return std::size_t(it - knots_.begin()) - 1;
}

void bspline_local_basis(std::size_t span, double u, const KnotVector& kv,
                         std::span<double> values, std::span<double> derivs) {
    const auto p = std::size_t(kv.degree());
    const auto& U = kv.knots();
    // Triangular table: ndu[j][r] holds basis values (upper) and knot
    // differences (lower), as in the standard derivative algorithm.
    std::array<double, 8> left{}, right{};
    std::array<std::array<double, 8>, 8> ndu{};
    if (p >= left.size()) throw DomainError("B-spline degree above 7 is not supported");

    ndu[0][0] = 1.0;
    for (std::size_t j = 1; j <= p; ++j) {
        left[j] = u - U[span + 1 - j];
        right[j] = U[span + j] - u;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double temp = ndu[j][r] == 0.0 ? 0.0 : ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (std::size_t j = 0; j <= p; ++j) values[j] = ndu[j][p];

    if (derivs.empty()) return;
    if (p == 0) {
        derivs[0] = 0.0;
        return;
    }
    // First derivative: p * (N_{r,p-1}/(U[r+p]-U[r]) - N_{r+1,p-1}/(U[r+p+1]-U[r+1])).
    for (std::size_t r = 0; r <= p; ++r) {
        double d = 0.0;
        if (r >= 1) {
            double denom = ndu[p][r - 1];
            if (denom != 0.0) d += ndu[r - 1][p - 1] / denom;
        }
        if (r <= p - 1) {
            double denom = ndu[p][r];
            if (denom != 0.0) d -= ndu[r][p - 1] / denom;
        }
        derivs[r] = double(p) * d;
    }
}

double bspline_basis(std::size_t i, double u, const KnotVector& kv) {
    if (i >= kv.function_count()) {
        throw IndexError("basis function index " + std::to_string(i) + " out of range");
    }
    const auto span = kv.find_span(u);
    const auto p = std::size_t(kv.degree());
    if (i + p < span || i > span) return 0.0;
    std::array<double, 8> vals{};
    bspline_local_basis(span, u, kv, std::span(vals).first(p + 1));
    return vals[i + p - span];
}

double bspline_basis_derivative(std::size_t i, double u, const KnotVector& kv) {
    if (i >= kv.function_count()) {
        throw IndexError("basis function index " + std::to_string(i) + " out of range");
    }
    const auto span = kv.find_span(u);
    const auto p = std::size_t(kv.degree());
    if (i + p < span || i > span) return 0.0;
    std::array<double, 8> vals{}, ders{};
    bspline_local_basis(span, u, kv, std::span(vals).first(p + 1), std::span(ders).first(p + 1));
    return ders[i + p - span];
}

double bernstein_basis(std::size_t i, std::size_t n, double u) {
    if (i > n) throw IndexError("Bernstein index " + std::to_string(i) + " exceeds degree");
    check_parameter(u);
    return binomial(n, i) * std::pow(u, double(i)) * std::pow(1.0 - u, double(n - i));
}

void bernstein_all(std::size_t n, double u, std::span<double> values, std::span<double> derivs) {
    check_parameter(u);
    // de Casteljau-style build-up: degree d values from degree d-1.
    values[0] = 1.0;
    const double v = 1.0 - u;
    for (std::size_t d = 1; d <= n; ++d) {
        double saved = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double temp = values[k];
            values[k] = saved + v * temp;
            saved = u * temp;
        }
        values[d] = saved;
        if (d == n - 1 && !derivs.empty()) {
            // derivative of degree n: n * (B_{k-1,n-1} - B_{k,n-1})
            for (std::size_t k = 0; k <= n; ++k) {
                double lo = k >= 1 ? values[k - 1] : 0.0;
                double hi = k <= n - 1 ? values[k] : 0.0;
                derivs[k] = double(n) * (lo - hi);
            }
        }
    }
    if (!derivs.empty() && n == 0) derivs[0] = 0.0;
    if (!derivs.empty() && n == 1) {
        derivs[0] = -1.0;
        derivs[1] = 1.0;
    }
}

namespace {
int checked_divisions(int divisions, const BasisKind& kind) {
    if (divisions < 1) throw DomainError("lattice needs at least one division per axis");
    if (kind.is_bspline() && (kind.degree < 1 || divisions < kind.degree)) {
        throw DomainError("dims must be >= degree (got " + std::to_string(divisions) +
                          " divisions for degree " + std::to_string(kind.degree) + ")");
    }
    return divisions;
}
}  // namespace

AxisBasis::AxisBasis(int divisions, BasisKind kind)
    : kind_(kind),
      count_(std::size_t(checked_divisions(divisions, kind)) + 1),
      width_(kind.is_bspline() ? std::size_t(kind.degree) + 1 : std::size_t(divisions) + 1),
      kv_(KnotVector::clamped_uniform(kind.is_bspline() ? std::size_t(divisions) + 1 : 1,
                                      kind.is_bspline() ? kind.degree : 0)) {}

std::size_t AxisBasis::evaluate(double u, std::span<double> values, std::span<double> derivs) const {
    if (kind_.is_bspline()) {
        auto span = kv_.find_span(u);
        bspline_local_basis(span, u, kv_, values.first(width_),
                            derivs.empty() ? derivs : derivs.first(width_));
        return span - std::size_t(kind_.degree);
    }
    bernstein_all(count_ - 1, u, values.first(width_),
                  derivs.empty() ? derivs : derivs.first(width_));
    return 0;
}

TensorBasis::TensorBasis(const Dims& dims, BasisKind kind)
    : dims_(dims),
      kind_(kind),
      axes_{AxisBasis(dims[0], kind), AxisBasis(dims[1], kind), AxisBasis(dims[2], kind)} {}

SparseRow TensorBasis::row(const Vec3& stu) const {
    SparseRow out;
    row(stu, out);
    return out;
}

void TensorBasis::row(const Vec3& stu, SparseRow& out) const {
    std::array<std::vector<double>, 3> vals;
    std::array<std::size_t, 3> first{};
    for (int a = 0; a < 3; ++a) {
        vals[a].resize(axes_[a].support_width());
        first[a] = axes_[a].evaluate(stu[a], vals[a]);
    }
    out.cols.clear();
    out.vals.clear();
    const bool dense = !kind_.is_bspline();
    if (dense) {
        out.cols.reserve(size());
        out.vals.reserve(size());
    }
    for (std::size_t a = 0; a < vals[0].size(); ++a) {
        for (std::size_t b = 0; b < vals[1].size(); ++b) {
            const double ab = vals[0][a] * vals[1][b];
            for (std::size_t c = 0; c < vals[2].size(); ++c) {
                const double v = ab * vals[2][c];
                if (v == 0.0 && !dense) continue;
                out.cols.push_back(std::uint32_t(flat_index(dims_, first[0] + a, first[1] + b,
                                                            first[2] + c)));
                out.vals.push_back(v);
            }
        }
    }
}

SparseRow tensor_row(const Vec3& stu, const Dims& dims, BasisKind kind) {
    return TensorBasis(dims, kind).row(stu);
}

}  // namespace ffd
