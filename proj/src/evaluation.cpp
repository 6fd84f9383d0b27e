#include "ffd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ffd/error.hpp"

namespace ffd {

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

EvalRecord landmark_record(const Mesh& fitted, const Mesh& target, const LandmarkScheme& scheme) {
    EvalRecord rec;
    rec.pred = sample_landmarks(fitted, scheme).points;
    rec.gt = sample_landmarks(target, scheme).points;
    std::vector<Vec3> gt(rec.gt.begin(), rec.gt.end());
    const auto box = bounding_box(gt);
    rec.box_width = box.extent().x();
    rec.box_height = box.extent().y();
    return rec;
}

}  // namespace

double nme(const EvalRecord& r, NmeNormalization norm) {
    if (!(r.box_width > 0.0) || !(r.box_height > 0.0)) {
        throw DomainError("NME needs a positive-area bounding box");
    }
    double size = 0.0;
    switch (norm) {
        case NmeNormalization::SqrtArea: size = std::sqrt(r.box_width * r.box_height); break;
        case NmeNormalization::MaxSide: size = std::max(r.box_width, r.box_height); break;
        case NmeNormalization::Diagonal: size = std::hypot(r.box_width, r.box_height); break;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        sum += std::hypot(r.pred[k].x() - r.gt[k].x(), r.pred[k].y() - r.gt[k].y());
    }
    return sum / double(kLandmarkCount) / size;
}

std::size_t yaw_bin(double yaw) {
    const double a = std::abs(yaw);
    if (!(a <= 90.0)) throw DomainError("|yaw| " + std::to_string(a) + " exceeds 90 degrees");
    if (a < 30.0) return 0;
    if (a < 60.0) return 1;
    return 2;
}

NmeTable table_from_bins(const std::array<std::optional<double>, kYawBins>& bins) {
    NmeTable t;
    t.bins = bins;
    double sum = 0.0;
    std::size_t filled = 0;
    for (std::size_t b = 0; b < kYawBins; ++b) {
        if (bins[b]) {
            sum += *bins[b];
            ++filled;
        } else {
            t.warnings.push_back("yaw bin [" + std::string(kYawBinLabels[b]) + "] is empty");
        }
    }
    if (filled == 0) throw DomainError("no records to tabulate");
    t.mean = sum / double(filled);
    return t;
}

NmeTable tabulate(std::span<const double> nme_fraction, std::span<const double> yaw) {
    if (nme_fraction.size() != yaw.size()) throw DimensionError("tabulate: size mismatch");
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < yaw.size(); ++i) {
        if (!(std::abs(yaw[i]) <= 90.0)) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string msg = "records with |yaw| > 90 degrees:";
        for (auto i : bad) msg += " " + std::to_string(i);
        throw DomainError(msg);
    }
    std::array<double, kYawBins> sums{};
    std::array<std::size_t, kYawBins> counts{};
    for (std::size_t i = 0; i < yaw.size(); ++i) {
        const auto b = yaw_bin(yaw[i]);
        sums[b] += nme_fraction[i];
        ++counts[b];
    }
    std::array<std::optional<double>, kYawBins> bins;
    for (std::size_t b = 0; b < kYawBins; ++b) {
        if (counts[b] > 0) bins[b] = 100.0 * sums[b] / double(counts[b]);
    }
    auto t = table_from_bins(bins);
    t.counts = counts;
    return t;
}

NmeTable bin_and_tabulate(std::span<const EvalRecord> records, NmeNormalization norm) {
    std::vector<double> e, y;
    e.reserve(records.size());
    y.reserve(records.size());
    for (const auto& r : records) {
        y.push_back(r.yaw);
        e.push_back(std::abs(r.yaw) <= 90.0 ? nme(r, norm) : 0.0);
    }
    return tabulate(e, y);
}

std::string format_table(const NmeTable& t, std::string_view label) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s%10s%10s%10s%10s\n", "Method", kYawBinLabels[0].data(),
                  kYawBinLabels[1].data(), kYawBinLabels[2].data(), "Mean");
    std::string text = buf;
    std::array<std::string, kYawBins> cells;
    for (std::size_t b = 0; b < kYawBins; ++b) cells[b] = t.bins[b] ? fixed2(*t.bins[b]) : "n/a";
    std::snprintf(buf, sizeof buf, "%-16s%10s%10s%10s%10s\n", std::string(label).c_str(),
                  cells[0].c_str(), cells[1].c_str(), cells[2].c_str(), fixed2(t.mean).c_str());
    text += buf;
    std::snprintf(buf, sizeof buf, "%-16s%10zu%10zu%10zu\n", "n", t.counts[0], t.counts[1],
                  t.counts[2]);
    text += buf;
    for (const auto& w : t.warnings) text += "warning: " + w + "\n";
    return text;
}

std::vector<std::size_t> balanced_sample(std::span<const double> yaw, std::size_t per_bin,
                                         std::uint64_t seed) {
    std::array<std::vector<std::size_t>, kYawBins> members;
    for (std::size_t i = 0; i < yaw.size(); ++i) members[yaw_bin(yaw[i])].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    out.reserve(per_bin * kYawBins);
    for (std::size_t b = 0; b < kYawBins; ++b) {
        if (members[b].size() < per_bin) {
            throw DomainError("yaw bin [" + std::string(kYawBinLabels[b]) + "] has " +
                              std::to_string(members[b].size()) + " records, " +
                              std::to_string(per_bin) + " requested");
        }
        std::shuffle(members[b].begin(), members[b].end(), rng);
        out.insert(out.end(), members[b].begin(), members[b].begin() + std::ptrdiff_t(per_bin));
    }
    return out;
}

std::vector<std::size_t> balanced_sample(std::span<const EvalRecord> records, std::size_t per_bin,
                                         std::uint64_t seed) {
    std::vector<double> yaw;
    for (const auto& r : records) yaw.push_back(r.yaw);
    return balanced_sample(yaw, per_bin, seed);
}

double landmark_nme(const Mesh& fitted, const Mesh& target, const LandmarkScheme& scheme) {
    return nme(landmark_record(fitted, target, scheme));
}

KindComparison compare_kinds(const ParameterizedMesh& pm_bspline,
                             const ParameterizedMesh& pm_bernstein, std::span<const Mesh> targets,
                             const LandmarkScheme& scheme, const LossWeights& weights,
                             const FitConfig& cfg) {
    if (!pm_bspline.grid.config.kind.is_bspline() || pm_bernstein.grid.config.kind.is_bspline()) {
        throw DomainError("compare_kinds expects a B-spline and a Bernstein parameterization");
    }
    if (pm_bspline.grid.config.dims != pm_bernstein.grid.config.dims ||
        pm_bspline.mesh.vertices != pm_bernstein.mesh.vertices) {
        throw DomainError("compare_kinds needs both parameterizations over the same mesh and dims");
    }
    if (targets.empty()) throw DomainError("compare_kinds needs at least one target");

    auto run = [&](const ParameterizedMesh& pm, const Mesh& target) {
        auto fit = fit_deformation(pm, target, scheme, weights, cfg);
        KindResult r;
        r.report = fit.report;
        r.objective = fit.objective;
        r.landmark_nme = landmark_nme(fit.fitted, target, scheme);
        r.surface_rmse = rmse(fit.fitted.vertices, target.vertices);
        r.fitted = std::move(fit.fitted);
        return r;
    };
    auto accumulate = [](KindAggregate& agg, const KindResult& r) {
        agg.mean_nme += r.landmark_nme;
        agg.mean_surface_rmse += r.surface_rmse;
        agg.mean_total_loss += r.report.total;
    };

    KindComparison cmp;
    for (const auto& target : targets) {
        TargetComparison tc{run(pm_bspline, target), run(pm_bernstein, target)};
        accumulate(cmp.bspline, tc.bspline);
        accumulate(cmp.bernstein, tc.bernstein);
        cmp.targets.push_back(std::move(tc));
    }
    for (auto* agg : {&cmp.bspline, &cmp.bernstein}) {
        const double n = double(targets.size());
        agg->mean_nme /= n;
        agg->mean_surface_rmse /= n;
        agg->mean_total_loss /= n;
    }
    return cmp;
}

std::string format_comparison(const KindComparison& cmp) {
    char line[256];
    std::string out = "target   kind        NME(%)    surface RMSE    total loss\n";
    auto row = [&](std::size_t i, const char* kind, const KindResult& r) {
        std::snprintf(line, sizeof line, "%-8zu %-10s %8.4f %15.6e %13.6e\n", i, kind,
                      100.0 * r.landmark_nme, r.surface_rmse, r.report.total);
        out += line;
    };
    for (std::size_t i = 0; i < cmp.targets.size(); ++i) {
        row(i, "bspline", cmp.targets[i].bspline);
        row(i, "bernstein", cmp.targets[i].bernstein);
    }
    std::snprintf(line, sizeof line, "mean     %-10s %8.4f %15.6e %13.6e\n", "bspline",
                  100.0 * cmp.bspline.mean_nme, cmp.bspline.mean_surface_rmse,
                  cmp.bspline.mean_total_loss);
    out += line;
    std::snprintf(line, sizeof line, "mean     %-10s %8.4f %15.6e %13.6e\n", "bernstein",
                  100.0 * cmp.bernstein.mean_nme, cmp.bernstein.mean_surface_rmse,
                  cmp.bernstein.mean_total_loss);
    out += line;
    std::snprintf(line, sizeof line,
                  "reference NME (%%) of the image-trained regressor: bernstein %.2f, bspline %.2f\n",
                  kReferenceNmeBernstein, kReferenceNmeBSpline);
    out += line;
    return out;
}

}  // namespace ffd
