#pragma once

#include <span>

#include <Eigen/Core>

#include "ffd/mesh.hpp"

namespace ffd {

using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// 3D scaled orthographic transform x -> s R x + t, one scale on all axes.
struct Pose {
    double scale = 1.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }

    // Throws DomainError unless s > 0, |R^T R - I|_inf <= 1e-9 and det R > 0.
    void validate() const;

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
    Pose inverse() const;
    Pose compose(const Pose& inner) const;  // (this o inner)(x)

    Mat34 as_matrix() const;
    // Nearest [sR | t] to an arbitrary 3x4 affine matrix (SVD projection).
    static Pose from_matrix(const Mat34& m);
};

Mesh apply_pose(const Mesh& mesh, const Pose& pose);
std::vector<Vec3> apply_pose(std::span<const Vec3> points, const Pose& pose);

// Least-squares similarity from src to dst, optionally weighted per point
// (closed form via the weighted cross-covariance SVD with a reflection guard).
// Throws DegenerateError for K < 3 or a rank-deficient configuration.
Pose estimate_pose(std::span<const Vec3> src, std::span<const Vec3> dst,
                   std::span<const double> weights = {});

// Intrinsic yaw (about +y, vertical), then pitch (about +x, lateral), then roll
// (about +z, frontal): R = Ry(yaw) * Rx(pitch) * Rz(roll). Degrees.
struct EulerAngles {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    bool gimbal_lock = false;  // |pitch| within 1e-6 degrees of 90
};

Mat3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg);
EulerAngles euler_angles(const Mat3& rotation);

// Throws DomainError at gimbal lock, where yaw is not determined.
double yaw_degrees(const Pose& pose);

}  // namespace ffd
