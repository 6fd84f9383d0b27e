#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffd/fitting.hpp"
#include "ffd/landmarks.hpp"

namespace ffd {

struct EvalRecord {
    std::array<Vec3, kLandmarkCount> pred;
    std::array<Vec3, kLandmarkCount> gt;
    double box_width = 0.0;   // ground-truth 2D box
    double box_height = 0.0;
    double yaw = 0.0;         // degrees
};

enum class NmeNormalization { SqrtArea, MaxSide, Diagonal };

// Mean 2D (x, y) landmark distance divided by the box size (sqrt(w h) by
// default). Returned as a fraction; tables report it x100.
double nme(const EvalRecord& record, NmeNormalization norm = NmeNormalization::SqrtArea);

inline constexpr std::size_t kYawBins = 3;
inline constexpr std::array<std::string_view, kYawBins> kYawBinLabels = {"0 to 30", "30 to 60",
                                                                          "60 to 90"};

// |yaw| in [0,30) -> 0, [30,60) -> 1, [60,90] -> 2. Throws DomainError past 90.
std::size_t yaw_bin(double yaw_degrees);

struct NmeTable {
    std::array<std::optional<double>, kYawBins> bins;  // NME in percent
    std::array<std::size_t, kYawBins> counts{};
    double mean = 0.0;  // unweighted mean of the non-empty bin means
    std::vector<std::string> warnings;
};

// Bins (nme fraction, yaw) pairs. Out-of-range yaws are rejected together,
// with their record indices in the message.
NmeTable tabulate(std::span<const double> nme_fraction, std::span<const double> yaw);
NmeTable bin_and_tabulate(std::span<const EvalRecord> records,
                          NmeNormalization norm = NmeNormalization::SqrtArea);
// Table from already-averaged bin values (percent).
NmeTable table_from_bins(const std::array<std::optional<double>, kYawBins>& bins_percent);

std::string format_table(const NmeTable& table, std::string_view label = "FFD");

// Exactly per_bin record indices from each yaw bin, drawn without replacement
// by a seeded mt19937_64 shuffle. Throws DomainError naming a short bin.
std::vector<std::size_t> balanced_sample(std::span<const double> yaw, std::size_t per_bin,
                                         std::uint64_t seed);
std::vector<std::size_t> balanced_sample(std::span<const EvalRecord> records, std::size_t per_bin,
                                         std::uint64_t seed);

struct KindResult {
    LossReport report;
    double objective = 0.0;
    double landmark_nme = 0.0;  // fraction
    double surface_rmse = 0.0;
    Mesh fitted;
};

struct TargetComparison {
    KindResult bspline;
    KindResult bernstein;
};

struct KindAggregate {
    double mean_nme = 0.0;  // fraction
    double mean_surface_rmse = 0.0;
    double mean_total_loss = 0.0;
};

// Published NME (%) of the learned regressor for each basis, quoted in reports.
inline constexpr double kReferenceNmeBernstein = 3.86;
inline constexpr double kReferenceNmeBSpline = 3.51;

struct KindComparison {
    std::vector<TargetComparison> targets;
    KindAggregate bspline;
    KindAggregate bernstein;
};

// Landmark NME of a fitted mesh against a target, box = 2D extent of the
// target's landmarks.
double landmark_nme(const Mesh& fitted, const Mesh& target, const LandmarkScheme& scheme);

// Fits every target with both bases (same reference mesh and dims) and
// reports residuals side by side. Does not decide a winner.
KindComparison compare_kinds(const ParameterizedMesh& pm_bspline,
                             const ParameterizedMesh& pm_bernstein, std::span<const Mesh> targets,
                             const LandmarkScheme& scheme, const LossWeights& weights = {},
                             const FitConfig& cfg = {});

std::string format_comparison(const KindComparison& cmp);

}  // namespace ffd
