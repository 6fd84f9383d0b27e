#include "ffd/fitting.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ffd/error.hpp"
#include "ffd/kernels.hpp"

namespace ffd {

namespace {

using RowMatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

Eigen::Map<RowMatX3> as_matrix(std::vector<Vec3>& v) {
    return {v.empty() ? nullptr : v.front().data(), Eigen::Index(v.size()), 3};
}
Eigen::Map<const RowMatX3> as_matrix(const std::vector<Vec3>& v) {
    return {v.empty() ? nullptr : v.front().data(), Eigen::Index(v.size()), 3};
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double squared_coordinate_sum(std::span<const Vec3> a, std::span<const Vec3> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
    return s;
}

void check_same_size(const Mesh& pred, const Mesh& gt) {
    if (pred.size() != gt.size()) {
        throw DimensionError("vertex count mismatch: " + std::to_string(pred.size()) + " vs " +
                             std::to_string(gt.size()));
    }
}

double region_mse(std::span<const Vec3> pred_posed, std::span<const Vec3> gt_posed,
                  const std::vector<std::uint32_t>& indices) {
    double s = 0.0;
    for (auto v : indices) s += (pred_posed[v] - gt_posed[v]).squaredNorm();
    return s / (3.0 * double(indices.size()));
}

// Target position per vertex; vertices without a target get weight 0 anyway.
std::vector<Vec3> target_points(std::size_t n, const FitTarget& target, const LandmarkScheme& scheme) {
    if (target.mesh) {
        if (target.mesh->size() != n) {
            throw DimensionError("target mesh has " + std::to_string(target.mesh->size()) +
                                 " vertices, reference has " + std::to_string(n));
        }
        return target.mesh->vertices;
    }
    scheme.check_against(n);
    std::vector<Vec3> y(n, Vec3::Zero());
    for (std::size_t q = 0; q < kLandmarkCount; ++q) y[scheme.order()[q]] = target.landmarks.points[q];
    return y;
}

double weighted_residual(std::span<const Vec3> pred, std::span<const Vec3> target,
                         std::span<const double> w) {
    double s = 0.0;
    for (std::size_t q = 0; q < pred.size(); ++q) {
        if (w[q] != 0.0) s += w[q] * (pred[q] - target[q]).squaredNorm();
    }
    return s;
}

double squared_norm(const std::vector<Vec3>& v) {
    double s = 0.0;
    for (const auto& x : v) s += x.squaredNorm();
    return s;
}

// Normal equations of  sum_q w_q |a_q^T (P0 + D) - y_q|^2  (scaled by s^2)
// plus lambda |D|^2, sharing one M x M matrix across the three coordinates.
class NormalSystem {
public:
    NormalSystem(const ParameterizedMesh& pm, std::vector<double> weights)
        : pm_(pm), w_(std::move(weights)), m_(pm.control_point_count()) {
        base_.resize(pm.mesh.size());
        pm.coeffs.multiply(pm.grid.points, base_);
        diag_ = Eigen::VectorXd::Zero(Eigen::Index(m_));
        const auto& c = pm.coeffs;
        for (std::size_t r = 0; r < c.rows(); ++r) {
            if (w_[r] == 0.0) continue;
            const auto vals = c.row_values(r);
            for (std::size_t k = 0; k < vals.size(); ++k) {
                const std::size_t col = c.dense() ? k : c.col_index()[c.row_ptr()[r] + k];
                diag_[Eigen::Index(col)] += w_[r] * vals[k] * vals[k];
            }
        }
        for (Eigen::Index i = 0; i < diag_.size(); ++i) unsupported_ += diag_[i] == 0.0 ? 1 : 0;
    }

    std::size_t size() const { return m_; }
    std::size_t unsupported() const { return unsupported_; }
    // Mean diagonal of A^T W A; the user lambda is relative to it.
    double data_scale() const {
        const double t = diag_.sum() / double(m_);
        return t > 0.0 ? t : 1.0;
    }
    const std::vector<double>& weights() const { return w_; }

    // s^2 * A^T W (y - A P0)
    std::vector<Vec3> rhs(std::span<const Vec3> y, double s2) const {
        std::vector<Vec3> r(y.size());
        for (std::size_t q = 0; q < y.size(); ++q) r[q] = y[q] - base_[q];
        std::vector<Vec3> out(m_, Vec3::Zero());
        pm_.coeffs.transpose_multiply(w_, r, out);
        for (auto& v : out) v *= s2;
        return out;
    }

    // (s^2 A^T W A + lambda I) x
    std::vector<Vec3> apply(const std::vector<Vec3>& x, double s2, double lambda) const {
        std::vector<Vec3> ax(pm_.mesh.size());
        pm_.coeffs.multiply(x, ax);
        std::vector<Vec3> out(m_, Vec3::Zero());
        pm_.coeffs.transpose_multiply(w_, ax, out);
        for (std::size_t i = 0; i < m_; ++i) out[i] = s2 * out[i] + lambda * x[i];
        return out;
    }

    const Eigen::MatrixXd& gram() const {
        if (gram_.size() == 0) build_gram();
        return gram_;
    }

    std::pair<std::vector<Vec3>, SolveInfo> solve(const std::vector<Vec3>& b, double s2,
                                                  double lambda, const FitConfig& cfg) const {
        Solver which = cfg.solver;
        if (which == Solver::Auto) which = m_ <= 1000 ? Solver::Dense : Solver::ConjugateGradient;
        auto result = which == Solver::Dense ? solve_dense(b, s2, lambda)
                                             : solve_cg(b, s2, lambda, cfg);
        result.second.unsupported_points = unsupported_;
        const double bnorm = std::sqrt(squared_norm(b));
        auto hx = apply(result.first, s2, lambda);
        double rn = 0.0;
        for (std::size_t i = 0; i < m_; ++i) rn += (hx[i] - b[i]).squaredNorm();
        result.second.relative_residual = bnorm > 0.0 ? std::sqrt(rn) / bnorm : std::sqrt(rn);
        return result;
    }

private:
    void build_gram() const {
        const auto& c = pm_.coeffs;
        gram_ = Eigen::MatrixXd::Zero(Eigen::Index(m_), Eigen::Index(m_));
        if (!c.dense()) {
            const auto& k = kernels::active();
            for (std::size_t r = 0; r < c.rows(); ++r) {
                if (w_[r] == 0.0) continue;
                const auto begin = c.row_ptr()[r];
                k.outer_accumulate(gram_.data(), m_, c.col_index().data() + begin,
                                   c.values().data() + begin, c.row_ptr()[r + 1] - begin, w_[r]);
            }
            return;
        }
        // Dense rows: blocked symmetric rank-k updates.
        constexpr Eigen::Index kChunk = 256;
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> block(kChunk, m_);
        Eigen::Index filled = 0;
        auto flush = [&] {
            if (filled == 0) return;
            gram_.selfadjointView<Eigen::Lower>().rankUpdate(block.topRows(filled).transpose());
            filled = 0;
        };
        for (std::size_t r = 0; r < c.rows(); ++r) {
            if (w_[r] == 0.0) continue;
            const auto vals = c.row_values(r);
            block.row(filled++) =
                std::sqrt(w_[r]) * Eigen::Map<const Eigen::RowVectorXd>(vals.data(), Eigen::Index(m_));
            if (filled == kChunk) flush();
        }
        flush();
        gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
    }

    std::pair<std::vector<Vec3>, SolveInfo> solve_dense(const std::vector<Vec3>& b, double s2,
                                                        double lambda) const {
        SolveInfo info;
        info.used = Solver::Dense;
        const auto mi = Eigen::Index(m_);
        // Symmetric Jacobi scaling: h = D^-1/2 hs D^-1/2 keeps weakly supported
        // control points above the rank cutoff.
        // A power-of-two prefactor makes the result exactly invariant to
        // doubling all weights.
        const double mean_d = (s2 * diag_.sum() + lambda * double(mi)) / double(mi);
        const double g = mean_d > 0.0 ? std::ldexp(1.0, std::ilogb(mean_d)) : 1.0;
        Eigen::VectorXd scale(mi);
        for (Eigen::Index i = 0; i < mi; ++i) {
            const double d = (s2 * diag_[i] + lambda) / g;
            scale[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
        }
        Eigen::MatrixXd hs = (s2 * gram() + lambda * Eigen::MatrixXd::Identity(mi, mi)) / g;
        hs = scale.asDiagonal() * hs * scale.asDiagonal();
        const Eigen::MatrixXd bs = scale.asDiagonal() * (Eigen::MatrixXd(as_matrix(b)) / g);
        std::vector<Vec3> x(m_, Vec3::Zero());
        auto xb = as_matrix(x);
        if (lambda > 0.0) {
            Eigen::LLT<Eigen::MatrixXd> llt(hs);
            if (llt.info() == Eigen::Success) {
                xb = scale.asDiagonal() * llt.solve(bs);
                info.rank = m_;
                return {std::move(x), info};
            }
        }
        // Semidefinite (lambda = 0): pseudo-inverse on the numerical range.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
        const auto& ev = es.eigenvalues();
        const double cutoff = std::max(ev.cwiseAbs().maxCoeff(), 0.0) * 1e-13;
        Eigen::VectorXd inv(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev[i] > cutoff) {
                inv[i] = 1.0 / ev[i];
                ++info.rank;
            } else {
                inv[i] = 0.0;
            }
        }
        const auto& v = es.eigenvectors();
        xb = scale.asDiagonal() * (v * (inv.asDiagonal() * (v.transpose() * bs)));
        info.rank_deficient = info.rank < m_;
        return {std::move(x), info};
    }

    // Jacobi-preconditioned CG, one independent recurrence per coordinate.
    std::pair<std::vector<Vec3>, SolveInfo> solve_cg(const std::vector<Vec3>& b, double s2,
                                                     double lambda, const FitConfig& cfg) const {
        SolveInfo info;
        info.used = Solver::ConjugateGradient;
        info.rank = m_ - (lambda > 0.0 ? 0 : unsupported_);
        info.rank_deficient = info.rank < m_;
        const auto& k = kernels::active();
        const int max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : int(10 * m_);

        std::vector<double> precond(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double d = s2 * diag_[Eigen::Index(i)] + lambda;
            precond[i] = d > 0.0 ? 1.0 / d : 1.0;
        }

        using Col = std::vector<double>;
        std::array<Col, 3> x, r, z, p, bcol;
        std::array<double, 3> rz{}, bnorm{};
        std::array<bool, 3> done{};
        for (int c = 0; c < 3; ++c) {
            x[c].assign(m_, 0.0);
            bcol[c].resize(m_);
            for (std::size_t i = 0; i < m_; ++i) bcol[c][i] = b[i][c];
            r[c] = bcol[c];
            z[c].resize(m_);
            for (std::size_t i = 0; i < m_; ++i) z[c][i] = precond[i] * r[c][i];
            p[c] = z[c];
            rz[c] = k.dot(r[c].data(), z[c].data(), m_);
            bnorm[c] = std::sqrt(k.dot(bcol[c].data(), bcol[c].data(), m_));
            done[c] = bnorm[c] == 0.0;
        }

        std::vector<Vec3> pv(m_);
        int it = 0;
        for (; it < max_iter && !(done[0] && done[1] && done[2]); ++it) {
            for (std::size_t i = 0; i < m_; ++i) pv[i] = Vec3(p[0][i], p[1][i], p[2][i]);
            const auto ap = apply(pv, s2, lambda);
            for (int c = 0; c < 3; ++c) {
                if (done[c]) continue;
                Col apc(m_);
                for (std::size_t i = 0; i < m_; ++i) apc[i] = ap[i][c];
                const double pap = k.dot(p[c].data(), apc.data(), m_);
                if (!(pap > 0.0)) {
                    done[c] = true;
                    continue;
                }
                const double alpha = rz[c] / pap;
                k.axpy(alpha, p[c].data(), x[c].data(), m_);
                k.axpy(-alpha, apc.data(), r[c].data(), m_);
                if (std::sqrt(k.dot(r[c].data(), r[c].data(), m_)) <= cfg.tolerance * bnorm[c]) {
                    done[c] = true;
                    continue;
                }
                for (std::size_t i = 0; i < m_; ++i) z[c][i] = precond[i] * r[c][i];
                const double rz_new = k.dot(r[c].data(), z[c].data(), m_);
                const double beta = rz_new / rz[c];
                rz[c] = rz_new;
                for (std::size_t i = 0; i < m_; ++i) p[c][i] = z[c][i] + beta * p[c][i];
            }
        }
        info.iterations = it;

        std::vector<Vec3> out(m_);
        for (std::size_t i = 0; i < m_; ++i) out[i] = Vec3(x[0][i], x[1][i], x[2][i]);
        if (!(done[0] && done[1] && done[2])) {
            double worst = 0.0;
            for (int c = 0; c < 3; ++c) {
                if (bnorm[c] > 0.0) {
                    worst = std::max(worst, std::sqrt(k.dot(r[c].data(), r[c].data(), m_)) / bnorm[c]);
                }
            }
            throw ConvergenceError("conjugate gradient did not converge in " +
                                       std::to_string(max_iter) + " iterations (relative residual " +
                                       sci(worst) + ")",
                                   std::size_t(it), worst);
        }
        return {std::move(out), info};
    }

    const ParameterizedMesh& pm_;
    std::vector<double> w_;
    std::size_t m_;
    std::vector<Vec3> base_;
    Eigen::VectorXd diag_;
    std::size_t unsupported_ = 0;
    mutable Eigen::MatrixXd gram_;
};

}  // namespace

LossWeights LossWeights::scaled(double factor) const {
    LossWeights out = *this;
    out.vertex *= factor;
    for (auto& w : out.regions) w *= factor;
    return out;
}

void LossWeights::validate() const {
    auto ok = [](double w) { return w >= 0.0 && std::isfinite(w); };
    if (!ok(vertex)) throw DomainError("vertex weight must be >= 0");
    for (auto r : kAllRegions) {
        if (!ok(region(r))) {
            throw DomainError("weight of region '" + std::string(region_name(r)) + "' must be >= 0");
        }
    }
}

void FitConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
    if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be > 0");
    if (rounds < 1) throw DomainError("at least one alternation round is required");
    if (max_iterations < 0) throw DomainError("max_iterations must be >= 0");
}

double vertex_loss(const Mesh& pred, const Mesh& gt, const Pose& pose_pred, const Pose& pose_gt) {
    check_same_size(pred, gt);
    const auto a = apply_pose(pred.vertices, pose_pred);
    const auto b = apply_pose(gt.vertices, pose_gt);
    return squared_coordinate_sum(a, b) / (3.0 * double(pred.size()));
}

double landmark_region_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                            Region region, const Pose& pose_pred, const Pose& pose_gt) {
    check_same_size(pred, gt);
    scheme.check_against(pred.size());
    const auto& idx = scheme.region(region);
    std::vector<Vec3> a, b;
    for (auto v : idx) {
        a.push_back(pose_pred.apply(pred.vertices[v]));
        b.push_back(pose_gt.apply(gt.vertices[v]));
    }
    return squared_coordinate_sum(a, b) / (3.0 * double(idx.size()));
}

double landmark_region_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                            std::string_view region, const Pose& pose_pred, const Pose& pose_gt) {
    auto r = region_from_name(region);
    if (!r) throw DomainError("unknown landmark region '" + std::string(region) + "'");
    return landmark_region_loss(pred, gt, scheme, *r, pose_pred, pose_gt);
}

LossReport total_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                      const LossWeights& weights, const Pose& pose_pred, const Pose& pose_gt) {
    check_same_size(pred, gt);
    return total_loss(pred, FitTarget::from_mesh(apply_pose(gt, pose_gt), scheme), scheme, weights,
                      pose_pred);
}

LossReport total_loss(const Mesh& pred, const FitTarget& target, const LandmarkScheme& scheme,
                      const LossWeights& weights, const Pose& pose_pred) {
    weights.validate();
    scheme.check_against(pred.size());
    const auto a = apply_pose(pred.vertices, pose_pred);
    const auto y = target_points(pred.size(), target, scheme);
    LossReport rep;
    rep.vertex_term_active = target.mesh.has_value();
    if (rep.vertex_term_active) rep.vertex_loss = squared_coordinate_sum(a, y) / (3.0 * double(a.size()));
    rep.total = rep.vertex_term_active ? weights.vertex * rep.vertex_loss : 0.0;
    for (auto r : kAllRegions) {
        const auto i = static_cast<std::size_t>(r);
        rep.region_losses[i] = region_mse(a, y, scheme.region(r));
        rep.total += weights.regions[i] * rep.region_losses[i];
    }
    return rep;
}

FitTarget FitTarget::from_mesh(Mesh mesh, const LandmarkScheme& scheme) {
    FitTarget t;
    t.landmarks = sample_landmarks(mesh, scheme);
    t.mesh = std::move(mesh);
    return t;
}

FitTarget FitTarget::from_landmarks(const LandmarkSample& landmarks) {
    FitTarget t;
    t.landmarks = landmarks;
    return t;
}

std::vector<double> vertex_weights(std::size_t n, const LandmarkScheme& scheme,
                                   const LossWeights& weights, bool vertex_term) {
    weights.validate();
    scheme.check_against(n);
    std::vector<double> w(n, vertex_term ? weights.vertex / (3.0 * double(n)) : 0.0);
    for (auto r : kAllRegions) {
        const auto& idx = scheme.region(r);
        const double wr = weights.region(r) / (3.0 * double(idx.size()));
        for (auto v : idx) w[v] += wr;
    }
    return w;
}

std::vector<Vec3> loss_gradient(const ParameterizedMesh& pm, const DeformationField& field,
                                const FitTarget& target, const LandmarkScheme& scheme,
                                const LossWeights& weights, const Pose& pose_pred) {
    field.check(pm.control_point_count());
    pose_pred.validate();
    const auto n = pm.mesh.size();
    const auto w = vertex_weights(n, scheme, weights, target.mesh.has_value());
    const auto y = target_points(n, target, scheme);
    const auto v = deformed_vertices(pm, field.delta);
    // d/dV_q of w_q |sRV_q + t - y_q|^2 = 2 w_q s R^T (sRV_q + t - y_q)
    std::vector<Vec3> dv(n);
    const Mat3 srt = pose_pred.scale * pose_pred.rotation.transpose();
    for (std::size_t q = 0; q < n; ++q) {
        dv[q] = w[q] == 0.0 ? Vec3::Zero() : Vec3(2.0 * w[q] * (srt * (pose_pred.apply(v[q]) - y[q])));
    }
    std::vector<Vec3> grad(pm.control_point_count(), Vec3::Zero());
    pm.coeffs.transpose_multiply({}, dv, grad);
    return grad;
}

std::vector<Vec3> loss_gradient(const ParameterizedMesh& pm, const DeformationField& field,
                                const Mesh& gt, const LandmarkScheme& scheme,
                                const LossWeights& weights, const Pose& pose_pred,
                                const Pose& pose_gt) {
    if (gt.size() != pm.mesh.size()) throw DimensionError("target vertex count mismatch");
    return loss_gradient(pm, field, FitTarget::from_mesh(apply_pose(gt, pose_gt), scheme), scheme,
                         weights, pose_pred);
}

DeformationFit fit_deformation(const ParameterizedMesh& pm, const Mesh& target,
                               const LandmarkScheme& scheme, const LossWeights& weights,
                               const FitConfig& cfg) {
    if (target.size() != pm.mesh.size()) throw DimensionError("target vertex count mismatch");
    return fit_deformation(pm, FitTarget::from_mesh(target, scheme), scheme, weights, cfg);
}

DeformationFit fit_deformation(const ParameterizedMesh& pm, const FitTarget& target,
                               const LandmarkScheme& scheme, const LossWeights& weights,
                               const FitConfig& cfg) {
    cfg.validate();
    const auto n = pm.mesh.size();
    const auto y = target_points(n, target, scheme);
    NormalSystem sys(pm, vertex_weights(n, scheme, weights, target.mesh.has_value()));
    const double lambda = cfg.lambda * sys.data_scale();
    auto [delta, info] = sys.solve(sys.rhs(y, 1.0), 1.0, lambda, cfg);
    info.effective_lambda = lambda;

    DeformationFit fit;
    fit.field.delta = std::move(delta);
    fit.solve = info;
    fit.fitted = deform(pm, fit.field);
    fit.report = total_loss(fit.fitted, target, scheme, weights);
    fit.objective = fit.report.total + lambda * squared_norm(fit.field.delta);
    return fit;
}

PoseDeformationFit fit_pose_and_deformation(const ParameterizedMesh& pm, const FitTarget& target,
                                            const LandmarkScheme& scheme,
                                            const LossWeights& weights, const FitConfig& cfg) {
    cfg.validate();
    const auto n = pm.mesh.size();
    const auto y = target_points(n, target, scheme);
    NormalSystem sys(pm, vertex_weights(n, scheme, weights, target.mesh.has_value()));
    const auto& w = sys.weights();
    const double lambda = cfg.lambda * sys.data_scale();

    PoseDeformationFit fit;
    fit.field = DeformationField::zero(pm.control_point_count());
    auto verts = deformed_vertices(pm, fit.field.delta);
    fit.pose = estimate_pose(verts, y, w);

    auto objective = [&](const std::vector<Vec3>& v, const Pose& pose, const std::vector<Vec3>& d) {
        return weighted_residual(apply_pose(v, pose), y, w) + lambda * squared_norm(d);
    };
    double prev = objective(verts, fit.pose, fit.field.delta);
    fit.round_objectives.push_back(prev);
    // Evaluation noise once the fit has driven the residual to rounding level:
    // relative to the start, plus an RMS change of 1e-9 box diagonals.
    const double diag = pm.grid.config.diagonal();
    const double floor = 1e-12 * prev + 1e-18 * diag * diag;

    for (int round = 0; round < cfg.rounds; ++round) {
        const Pose inv = fit.pose.inverse();
        std::vector<Vec3> y_world(n);
        for (std::size_t q = 0; q < n; ++q) y_world[q] = inv.apply(y[q]);
        const double s2 = fit.pose.scale * fit.pose.scale;
        auto [delta, info] = sys.solve(sys.rhs(y_world, s2), s2, lambda, cfg);
        fit.field.delta = std::move(delta);
        fit.solve = info;
        fit.solve.effective_lambda = lambda;

        verts = deformed_vertices(pm, fit.field.delta);
        fit.pose = estimate_pose(verts, y, w);
        const double cur = objective(verts, fit.pose, fit.field.delta);
        fit.round_objectives.push_back(cur);
        // Both half-steps are exact minimizers, so only rounding may raise J.
        if (cur > prev * (1.0 + 1e-9) + floor) {
            throw std::logic_error("alternation objective increased from " + sci(prev) + " to " +
                                   sci(cur) + " in round " +
                                   std::to_string(round + 1));
        }
        const bool settled = prev - cur <= cfg.tolerance * prev + floor;
        prev = std::min(prev, cur);
        if (settled) break;
    }

    fit.fitted = apply_pose(Mesh{verts, pm.mesh.faces}, fit.pose);
    fit.report = total_loss(fit.fitted, target, scheme, weights);
    fit.objective = fit.report.total + lambda * squared_norm(fit.field.delta);
    const auto lm = sample_landmarks(fit.fitted, scheme);
    fit.landmark_rmse = rmse(lm.points, target.landmarks.points);
    fit.surface_constrained = target.mesh.has_value();
    if (target.mesh) fit.surface_rmse = rmse(fit.fitted.vertices, target.mesh->vertices);
    return fit;
}

double rmse(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.size() != b.size() || a.empty()) throw DimensionError("rmse: size mismatch");
    return std::sqrt(squared_coordinate_sum(a, b) / double(a.size()));
}

}  // namespace ffd
