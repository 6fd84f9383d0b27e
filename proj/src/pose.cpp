#include "ffd/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "ffd/error.hpp"

namespace ffd {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

}  // namespace

void Pose::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("pose scale must be positive");
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-9)) {
        throw DomainError("pose rotation is not orthonormal (error " + std::to_string(ortho) + ")");
    }
    if (!(rotation.determinant() > 0.0)) throw DomainError("pose rotation has det <= 0");
    if (!translation.allFinite()) throw DomainError("pose translation is not finite");
}

Pose Pose::inverse() const {
    Pose inv;
    inv.scale = 1.0 / scale;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation) / scale;
    return inv;
}

Pose Pose::compose(const Pose& inner) const {
    Pose out;
    out.scale = scale * inner.scale;
    out.rotation = rotation * inner.rotation;
    out.translation = scale * (rotation * inner.translation) + translation;
    return out;
}

Mat34 Pose::as_matrix() const {
    Mat34 m;
    m.leftCols<3>() = scale * rotation;
    m.col(3) = translation;
    return m;
}

Pose Pose::from_matrix(const Mat34& m) {
    const Mat3 a = m.leftCols<3>();
    Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    Pose p;
    p.rotation = svd.matrixU() * d * svd.matrixV().transpose();
    p.scale = (svd.singularValues().asDiagonal() * d).trace() / 3.0;
    p.translation = m.col(3);
    p.validate();
    return p;
}

Mesh apply_pose(const Mesh& mesh, const Pose& pose) {
    return Mesh{apply_pose(mesh.vertices, pose), mesh.faces};
}

std::vector<Vec3> apply_pose(std::span<const Vec3> points, const Pose& pose) {
    pose.validate();
    std::vector<Vec3> out;
    out.reserve(points.size());
    const Mat3 sr = pose.scale * pose.rotation;
    for (const auto& p : points) out.push_back(sr * p + pose.translation);
    return out;
}

Pose estimate_pose(std::span<const Vec3> src, std::span<const Vec3> dst,
                   std::span<const double> weights) {
    if (src.size() != dst.size()) throw DimensionError("estimate_pose: point count mismatch");
    if (!weights.empty() && weights.size() != src.size()) {
        throw DimensionError("estimate_pose: weight count mismatch");
    }
    std::size_t active = 0;
    double wsum = 0.0;
    Vec3 mu_src = Vec3::Zero(), mu_dst = Vec3::Zero();
    for (std::size_t k = 0; k < src.size(); ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        if (w < 0.0) throw DomainError("estimate_pose: negative weight");
        if (w == 0.0) continue;
        ++active;
        wsum += w;
        mu_src += w * src[k];
        mu_dst += w * dst[k];
    }
    if (active < 3) throw DegenerateError("estimate_pose needs at least 3 weighted points");
    mu_src /= wsum;
    mu_dst /= wsum;

    Mat3 cov = Mat3::Zero();
    double var_src = 0.0;
    for (std::size_t k = 0; k < src.size(); ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        if (w == 0.0) continue;
        const Vec3 a = src[k] - mu_src;
        cov += w * (dst[k] - mu_dst) * a.transpose();
        var_src += w * a.squaredNorm();
    }
    cov /= wsum;
    var_src /= wsum;

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sv = svd.singularValues();
    // Collinear or coincident sources leave the rotation about the line free.
    if (!(var_src > 0.0) || !(sv[1] > 1e-12 * sv[0])) {
        throw DegenerateError("estimate_pose: degenerate (collinear) correspondences");
    }
    Mat3 d = Mat3::Identity();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d(2, 2) = -1.0;

    Pose p;
    p.rotation = svd.matrixU() * d * svd.matrixV().transpose();
    p.scale = (sv.asDiagonal() * d).trace() / var_src;
    if (!(p.scale > 0.0)) throw DegenerateError("estimate_pose: non-positive scale");
    p.translation = mu_dst - p.scale * (p.rotation * mu_src);
    return p;
}

Mat3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg) {
    using Eigen::AngleAxisd;
    return (AngleAxisd(yaw_deg / kDeg, Vec3::UnitY()) * AngleAxisd(pitch_deg / kDeg, Vec3::UnitX()) *
            AngleAxisd(roll_deg / kDeg, Vec3::UnitZ()))
        .toRotationMatrix();
}

EulerAngles euler_angles(const Mat3& r) {
    // R = Ry(a) Rx(b) Rz(c): R(1,2) = -sin b, R(0,2)/R(2,2) = tan a,
    // R(1,0)/R(1,1) = tan c.
    EulerAngles e;
    // cos(pitch) from the first column pair is well conditioned near +/-90,
    // where asin(-r12) is not.
    const double cb = std::hypot(r(0, 2), r(2, 2));
    e.pitch = std::atan2(-r(1, 2), cb) * kDeg;
    e.gimbal_lock = cb <= std::sin(1e-6 / kDeg);
    if (e.gimbal_lock) {
        // Only yaw +/- roll is determined; report it all as yaw.
        e.yaw = std::atan2(-r(2, 0), r(0, 0)) * kDeg;
        e.roll = 0.0;
    } else {
        e.yaw = std::atan2(r(0, 2), r(2, 2)) * kDeg;
        e.roll = std::atan2(r(1, 0), r(1, 1)) * kDeg;
    }
    return e;
}

double yaw_degrees(const Pose& pose) {
    pose.validate();
    const auto e = euler_angles(pose.rotation);
    if (e.gimbal_lock) throw DomainError("yaw undefined: pitch at gimbal lock");
    return e.yaw;
}

}  // namespace ffd
