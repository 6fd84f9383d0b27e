#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ffd/landmarks.hpp"
#include "ffd/lattice.hpp"
#include "ffd/pose.hpp"

namespace ffd {

inline constexpr double kDefaultVertexWeight = 0.46;
inline constexpr double kDefaultRegionWeight = 0.06;

struct LossWeights {
    double vertex = kDefaultVertexWeight;
    std::array<double, kRegionCount> regions = filled(kDefaultRegionWeight);

    double region(Region r) const { return regions[static_cast<std::size_t>(r)]; }
    LossWeights scaled(double factor) const;
    void validate() const;  // all weights >= 0 and finite

    static constexpr std::array<double, kRegionCount> filled(double w) {
        std::array<double, kRegionCount> a{};
        for (auto& x : a) x = w;
        return a;
    }
};

struct LossReport {
    double vertex_loss = 0.0;
    std::array<double, kRegionCount> region_losses{};
    double total = 0.0;
    bool vertex_term_active = true;  // false for landmark-only targets

    double region(Region r) const { return region_losses[static_cast<std::size_t>(r)]; }
};

// Mean squared error over every vertex coordinate (divides by 3N) between
// pose_pred(pred) and pose_gt(gt).
double vertex_loss(const Mesh& pred, const Mesh& gt, const Pose& pose_pred = Pose::identity(),
                   const Pose& pose_gt = Pose::identity());

// Same mean convention over one region's landmarks (divides by 3M).
double landmark_region_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                            Region region, const Pose& pose_pred = Pose::identity(),
                            const Pose& pose_gt = Pose::identity());
double landmark_region_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                            std::string_view region, const Pose& pose_pred = Pose::identity(),
                            const Pose& pose_gt = Pose::identity());

LossReport total_loss(const Mesh& pred, const Mesh& gt, const LandmarkScheme& scheme,
                      const LossWeights& weights, const Pose& pose_pred = Pose::identity(),
                      const Pose& pose_gt = Pose::identity());

// What a fit is matched against, already in the target (camera) frame: a full
// index-corresponding mesh, or just the 68 landmarks in scheme order.
struct FitTarget {
    std::optional<Mesh> mesh;
    LandmarkSample landmarks;

    static FitTarget from_mesh(Mesh mesh, const LandmarkScheme& scheme);
    static FitTarget from_landmarks(const LandmarkSample& landmarks);
};

// Landmark-only variant: the vertex term is inactive and reported as 0.
LossReport total_loss(const Mesh& pred, const FitTarget& target, const LandmarkScheme& scheme,
                      const LossWeights& weights, const Pose& pose_pred = Pose::identity());

// Per-vertex weight w_q such that the total loss equals sum_q w_q |pred_q - gt_q|^2.
std::vector<double> vertex_weights(std::size_t vertex_count, const LandmarkScheme& scheme,
                                   const LossWeights& weights, bool vertex_term);

// d(total_loss)/d(delta) for pred = deform(pm, field), M x 3.
std::vector<Vec3> loss_gradient(const ParameterizedMesh& pm, const DeformationField& field,
                                const FitTarget& target, const LandmarkScheme& scheme,
                                const LossWeights& weights, const Pose& pose_pred = Pose::identity());
std::vector<Vec3> loss_gradient(const ParameterizedMesh& pm, const DeformationField& field,
                                const Mesh& gt, const LandmarkScheme& scheme,
                                const LossWeights& weights, const Pose& pose_pred,
                                const Pose& pose_gt);

enum class Solver { Auto, Dense, ConjugateGradient };

struct FitConfig {
    // Tikhonov weight on |delta|^2, relative to the mean diagonal of the data
    // term's normal matrix A^T W A: the penalty applied is
    // lambda * trace(A^T W A) / M * |delta|^2 (see SolveInfo::effective_lambda).
    double lambda = 1e-8;
    double tolerance = 1e-10;  // relative normal-equation residual / objective decrease
    int max_iterations = 0;    // CG iterations; 0 means 10 * M
    int rounds = 20;           // pose <-> deformation alternation rounds
    Solver solver = Solver::Auto;

    void validate() const;
};

struct SolveInfo {
    Solver used = Solver::Dense;
    int iterations = 0;
    double relative_residual = 0.0;
    std::size_t rank = 0;
    bool rank_deficient = false;
    std::size_t unsupported_points = 0;  // control points no vertex depends on
    double effective_lambda = 0.0;       // absolute weight on |delta|^2
};

struct DeformationFit {
    DeformationField field;
    LossReport report;
    double objective = 0.0;  // report.total + effective_lambda |delta|^2
    SolveInfo solve;
    Mesh fitted;
};

// Minimizes total_loss(deform(pm, delta), target) + effective_lambda |delta|^2 with
// identity poses. The deformed mesh is linear in delta, so this is weighted
// linear least squares, solved on its normal equations.
DeformationFit fit_deformation(const ParameterizedMesh& pm, const Mesh& target,
                               const LandmarkScheme& scheme, const LossWeights& weights = {},
                               const FitConfig& cfg = {});
DeformationFit fit_deformation(const ParameterizedMesh& pm, const FitTarget& target,
                               const LandmarkScheme& scheme, const LossWeights& weights = {},
                               const FitConfig& cfg = {});

struct PoseDeformationFit {
    Pose pose;
    DeformationField field;
    LossReport report;
    double objective = 0.0;
    std::vector<double> round_objectives;  // [0] is after the initial pose estimate
    SolveInfo solve;
    Mesh fitted;  // pose(deform(pm, field))
    double landmark_rmse = 0.0;
    std::optional<double> surface_rmse;  // only for full-mesh targets
    bool surface_constrained = true;
};

// Block-coordinate descent: weighted similarity fit on the current mesh, then
// a deformation fit in the de-posed frame, until the objective stops falling.
// Throws std::logic_error if a round ever increases the objective.
PoseDeformationFit fit_pose_and_deformation(const ParameterizedMesh& pm, const FitTarget& target,
                                            const LandmarkScheme& scheme,
                                            const LossWeights& weights = {},
                                            const FitConfig& cfg = {});

// Root mean squared Euclidean distance between corresponding points.
double rmse(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace ffd
