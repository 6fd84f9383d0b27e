// ffdtool: command-line front end for lattice embedding, deformation, fitting,
// landmark evaluation and editor bundle export.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffd/bundle.hpp"
#include "ffd/error.hpp"
#include "ffd/evaluation.hpp"
#include "ffd/fitting.hpp"
#include "ffd/kernels.hpp"
#include "ffd/lattice.hpp"
#include "ffd/sample_face.hpp"
#include "ffd/serialize.hpp"

namespace {

using namespace ffd;
namespace fs = std::filesystem;

Dims parse_dims(const std::string& text) {
    Dims d{};
    std::istringstream in(text);
    std::string part;
    int a = 0;
    while (std::getline(in, part, ',')) {
        if (a >= 3) throw DomainError("--dims expects l,m,n");
        d[a++] = std::stoi(part);
    }
    if (a != 3) throw DomainError("--dims expects l,m,n");
    return d;
}

BasisKind parse_kind(const std::string& kind, int degree) {
    if (kind == "bspline") return BasisKind::bspline(degree);
    if (kind == "bernstein") return BasisKind::bernstein();
    throw DomainError("--kind must be bspline or bernstein");
}

std::string hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParameterizedMesh load_parameterization(const fs::path& p) {
    return parameterization_from_json(read_json_file(p));
}

// A target is either a mesh (OBJ or JSON mesh) or a JSON file holding
// {"landmarks": [[x,y,z] x 68]} in scheme order.
FitTarget load_target(const fs::path& p, const LandmarkScheme& scheme) {
    if (p.extension() == ".json") {
        auto doc = read_json_file(p);
        if (doc.contains("landmarks")) {
            const auto& lm = doc["landmarks"];
            if (lm.size() != kLandmarkCount) throw DomainError("landmark target needs 68 points");
            LandmarkSample s;
            for (std::size_t k = 0; k < kLandmarkCount; ++k) {
                s.points[k] = Vec3(lm[k].at(0).get<double>(), lm[k].at(1).get<double>(),
                                   lm[k].at(2).get<double>());
            }
            return FitTarget::from_landmarks(s);
        }
        return FitTarget::from_mesh(mesh_from_json(doc), scheme);
    }
    return FitTarget::from_mesh(load_mesh(p), scheme);
}

struct EmbedArgs {
    std::string mesh, out, lattice_out, dims = "6,19,4", kind = "bspline";
    int degree = 3;
    double padding = kDefaultPadding;
};

int run_embed(const EmbedArgs& a) {
    const auto mesh = load_mesh(a.mesh);
    const auto kind = parse_kind(a.kind, a.degree);
    const auto grid = build_lattice(mesh, parse_dims(a.dims), kind, a.padding);
    const auto pm = parameterize(mesh, grid);
    write_json_file(parameterization_to_json(pm), a.out);
    const fs::path lattice_out =
        a.lattice_out.empty() ? fs::path(a.out).replace_extension(".lattice.json") : fs::path(a.lattice_out);
    write_json_file(lattice_to_json(pm.grid), lattice_out, 1);
    const double diag = pm.grid.config.diagonal();
    std::printf("vertices: %zu\ncontrol points: %zu\nnonzeros: %zu\n", mesh.size(),
                pm.control_point_count(), pm.coeffs.nonzeros());
    std::printf("max reconstruction residual: %.3e (%.3e x box diagonal)\n", pm.max_residual,
                pm.max_residual / diag);
    std::printf("wrote %s and %s\n", a.out.c_str(), lattice_out.string().c_str());
    return 0;
}

struct DeformArgs {
    std::string param, delta, pose, out;
};

int run_deform(const DeformArgs& a) {
    const auto pm = load_parameterization(a.param);
    const auto field = field_from_json(read_json_file(a.delta));
    auto mesh = deform(pm, field);
    if (!a.pose.empty()) mesh = apply_pose(mesh, pose_from_json(read_json_file(a.pose)));
    save_mesh(mesh, a.out);
    std::printf("mesh_hash: %s\nwrote %s\n", hex(vertex_hash(mesh.vertices)).c_str(), a.out.c_str());
    return 0;
}

struct FitArgs {
    std::string param, target, scheme, weights, out_delta, out_pose, report, solver = "auto";
    std::optional<double> lambda;
    int rounds = 20;
    bool no_pose = false;
};

int run_fit(const FitArgs& a) {
    const auto pm = load_parameterization(a.param);
    const auto scheme = load_landmark_scheme(a.scheme);
    scheme.check_against(pm.mesh.size());
    const auto target = load_target(a.target, scheme);
    LossWeights weights;
    if (!a.weights.empty()) weights = weights_from_json(read_json_file(a.weights));
    FitConfig cfg;
    if (a.lambda) cfg.lambda = *a.lambda;
    cfg.rounds = a.rounds;
    if (a.solver == "dense") cfg.solver = Solver::Dense;
    else if (a.solver == "cg") cfg.solver = Solver::ConjugateGradient;
    else if (a.solver != "auto") throw DomainError("--solver must be auto, dense or cg");

    PoseDeformationFit fit;
    if (a.no_pose) {
        auto d = fit_deformation(pm, target, scheme, weights, cfg);
        fit.pose = Pose::identity();
        fit.field = std::move(d.field);
        fit.report = d.report;
        fit.objective = d.objective;
        fit.round_objectives = {d.objective};
        fit.solve = d.solve;
        fit.fitted = std::move(d.fitted);
        fit.landmark_rmse = rmse(sample_landmarks(fit.fitted, scheme).points, target.landmarks.points);
        fit.surface_constrained = target.mesh.has_value();
        if (target.mesh) fit.surface_rmse = rmse(fit.fitted.vertices, target.mesh->vertices);
    } else {
        fit = fit_pose_and_deformation(pm, target, scheme, weights, cfg);
    }

    write_json_file(field_to_json(fit.field), a.out_delta);
    write_json_file(pose_to_json(fit.pose), a.out_pose, 1);

    const char* method = fit.solve.used == Solver::Dense ? "dense" : "cg";
    Json report = {
        {"weights", weights_to_json(weights)},
        {"lambda", cfg.lambda},
        {"effective_lambda", fit.solve.effective_lambda},
        {"regularization_active", cfg.lambda > 0.0},
        {"losses", loss_report_to_json(fit.report)},
        {"objective", fit.objective},
        {"round_objectives", fit.round_objectives},
        {"solver",
         {{"method", method},
          {"iterations", fit.solve.iterations},
          {"relative_residual", fit.solve.relative_residual},
          {"rank", fit.solve.rank},
          {"rank_deficient", fit.solve.rank_deficient},
          {"unsupported_control_points", fit.solve.unsupported_points}}},
        {"residuals",
         {{"landmark_rmse", fit.landmark_rmse},
          {"surface_rmse", fit.surface_rmse ? Json(*fit.surface_rmse) : Json(nullptr)},
          {"surface", fit.surface_constrained ? "constrained" : "unconstrained"}}},
        {"outputs", {{"delta", a.out_delta}, {"pose", a.out_pose}}},
        {"mesh_hash", hex(vertex_hash(fit.fitted.vertices))},
    };
    if (!a.report.empty()) write_json_file(report, a.report, 1);

    std::printf("objective: %.6e (lambda %.3e%s)\n", fit.objective, cfg.lambda,
                cfg.lambda > 0.0 ? ", regularization active" : "");
    std::printf("landmark rmse: %.6e\n", fit.landmark_rmse);
    if (fit.surface_rmse) {
        std::printf("surface rmse: %.6e\n", *fit.surface_rmse);
    } else {
        std::printf("surface: unconstrained (landmark-only target; lambda >= 1e-4 recommended)\n");
    }
    if (fit.solve.rank_deficient) {
        std::printf("warning: normal equations are rank deficient (rank %zu of %zu)\n",
                    fit.solve.rank, pm.control_point_count());
    }
    std::printf("mesh_hash: %s\n", hex(vertex_hash(fit.fitted.vertices)).c_str());
    return 0;
}

struct EvalArgs {
    std::string records, json_out, label = "FFD", normalization = "sqrt-area";
    std::size_t per_bin = 0;
    std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& a) {
    auto records = load_records_jsonl(a.records);
    NmeNormalization norm = NmeNormalization::SqrtArea;
    if (a.normalization == "max-side") norm = NmeNormalization::MaxSide;
    else if (a.normalization == "diagonal") norm = NmeNormalization::Diagonal;
    else if (a.normalization != "sqrt-area") throw DomainError("unknown --normalization");
    if (a.per_bin > 0) {
        std::vector<EvalRecord> picked;
        for (auto i : balanced_sample(records, a.per_bin, a.seed)) picked.push_back(records[i]);
        records = std::move(picked);
    }
    const auto table = bin_and_tabulate(records, norm);
    std::fputs(format_table(table, a.label).c_str(), stdout);
    if (!a.json_out.empty()) write_json_file(table_to_json(table), a.json_out, 1);
    return 0;
}

struct BundleArgs {
    std::string param, delta, pose, out;
};

int run_export_bundle(const BundleArgs& a) {
    const auto pm = load_parameterization(a.param);
    std::optional<DeformationField> field;
    std::optional<Pose> pose;
    if (!a.delta.empty()) field = field_from_json(read_json_file(a.delta));
    if (!a.pose.empty()) pose = pose_from_json(read_json_file(a.pose));
    const auto bundle = make_bundle(pm, field, pose);
    save_bundle(bundle, a.out);
    std::size_t max_nnz = 0;
    for (const auto& row : bundle.indices) max_nnz = std::max(max_nnz, row.size());
    std::printf("bundle: %zu vertices, %zu control points, max %zu coefficients per row\nwrote %s\n",
                bundle.mesh.size(), bundle.lattice.points.size(), max_nnz, a.out.c_str());
    return 0;
}

struct CompareArgs {
    std::string mesh, scheme, dims = "6,19,4", json_out;
    std::vector<std::string> targets;
    double padding = kDefaultPadding;
    std::optional<double> lambda;
};

int run_compare(const CompareArgs& a) {
    const auto mesh = load_mesh(a.mesh);
    const auto scheme = load_landmark_scheme(a.scheme);
    const auto dims = parse_dims(a.dims);
    const auto pm_b = parameterize(mesh, build_lattice(mesh, dims, BasisKind::bspline(3), a.padding));
    const auto pm_z = parameterize(mesh, build_lattice(mesh, dims, BasisKind::bernstein(), a.padding));
    std::vector<Mesh> targets;
    for (const auto& t : a.targets) targets.push_back(load_mesh(t));
    FitConfig cfg;
    if (a.lambda) cfg.lambda = *a.lambda;
    const auto cmp = compare_kinds(pm_b, pm_z, targets, scheme, {}, cfg);
    std::fputs(format_comparison(cmp).c_str(), stdout);
    if (!a.json_out.empty()) write_json_file(comparison_to_json(cmp), a.json_out, 1);
    return 0;
}

struct SampleArgs {
    std::size_t vertices = kSampleFaceVertices;
    std::string mesh_out, scheme_out;
};

int run_make_sample(const SampleArgs& a) {
    const auto face = make_synthetic_face(a.vertices);
    save_mesh(face.mesh, a.mesh_out);
    save_landmark_scheme(face.scheme, a.scheme_out);
    std::printf("wrote %s (%zu vertices, %zu faces) and %s\n", a.mesh_out.c_str(), face.mesh.size(),
                face.mesh.faces.size(), a.scheme_out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-form deformation of face meshes: embed, deform, fit, evaluate"};
    app.require_subcommand(1);

    EmbedArgs embed;
    auto* c_embed = app.add_subcommand("embed", "Embed a mesh in a control lattice and parameterize it");
    c_embed->add_option("--mesh", embed.mesh, "Reference mesh (.obj or .json)")->required();
    c_embed->add_option("--out", embed.out, "Parameterization output (.json)")->required();
    c_embed->add_option("--lattice-out", embed.lattice_out, "Lattice output (default <out>.lattice.json)");
    c_embed->add_option("--dims", embed.dims, "Divisions l,m,n")->capture_default_str();
    c_embed->add_option("--kind", embed.kind, "bspline or bernstein")->capture_default_str();
    c_embed->add_option("--degree", embed.degree, "B-spline degree")->capture_default_str();
    c_embed->add_option("--padding", embed.padding, "Box margin per side, fraction of extent")
        ->capture_default_str();

    DeformArgs def;
    auto* c_deform = app.add_subcommand("deform", "Apply a control-point displacement field");
    c_deform->add_option("--param", def.param, "Parameterization from embed")->required();
    c_deform->add_option("--delta", def.delta, "DeformationField JSON")->required();
    c_deform->add_option("--pose", def.pose, "Optional pose JSON applied after deformation");
    c_deform->add_option("--out", def.out, "Output mesh (.obj or .json)")->required();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit pose and displacements to a target mesh or landmarks");
    c_fit->add_option("--param", fit.param, "Parameterization from embed")->required();
    c_fit->add_option("--target", fit.target, "Target mesh, or JSON with 68 \"landmarks\"")->required();
    c_fit->add_option("--scheme", fit.scheme, "Landmark scheme JSON")->required();
    c_fit->add_option("--weights", fit.weights, "Loss weights JSON (defaults 0.46 / 0.06)");
    c_fit->add_option("--lambda", fit.lambda,
                      "Tikhonov weight on |delta|^2, relative to the data term scale (default 1e-8)");
    c_fit->add_option("--rounds", fit.rounds, "Pose/deformation alternation rounds")->capture_default_str();
    c_fit->add_option("--solver", fit.solver, "auto, dense or cg")->capture_default_str();
    c_fit->add_flag("--no-pose", fit.no_pose, "Fit displacements only, identity pose");
    c_fit->add_option("--out-delta", fit.out_delta, "DeformationField output")->required();
    c_fit->add_option("--out-pose", fit.out_pose, "Pose output")->required();
    c_fit->add_option("--report", fit.report, "Fit report output");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "NME table by yaw range from JSON-lines records");
    c_eval->add_option("--records", ev.records, "JSON-lines records")->required();
    c_eval->add_option("--json", ev.json_out, "Machine-readable table output");
    c_eval->add_option("--label", ev.label, "Row label")->capture_default_str();
    c_eval->add_option("--normalization", ev.normalization, "sqrt-area, max-side or diagonal")
        ->capture_default_str();
    c_eval->add_option("--per-bin", ev.per_bin, "Balanced sample size per yaw bin (0 = all)");
    c_eval->add_option("--seed", ev.seed, "Sampling seed")->capture_default_str();

    BundleArgs bun;
    auto* c_bundle = app.add_subcommand("export-bundle", "Write the editor bundle");
    c_bundle->add_option("--param", bun.param, "Parameterization from embed")->required();
    c_bundle->add_option("--delta", bun.delta, "Initial DeformationField (default zero)");
    c_bundle->add_option("--pose", bun.pose, "Optional pose");
    c_bundle->add_option("--out", bun.out, "Bundle output (.json)")->required();

    CompareArgs cmp;
    auto* c_compare = app.add_subcommand("compare", "Fit targets with B-spline and Bernstein lattices");
    c_compare->add_option("--mesh", cmp.mesh, "Reference mesh")->required();
    c_compare->add_option("--scheme", cmp.scheme, "Landmark scheme JSON")->required();
    c_compare->add_option("--targets", cmp.targets, "Index-corresponding target meshes")->required();
    c_compare->add_option("--dims", cmp.dims, "Divisions l,m,n")->capture_default_str();
    c_compare->add_option("--padding", cmp.padding, "Box margin")->capture_default_str();
    c_compare->add_option("--lambda", cmp.lambda, "Relative Tikhonov weight (default 1e-8)");
    c_compare->add_option("--json", cmp.json_out, "Machine-readable report");

    SampleArgs sample;
    auto* c_sample = app.add_subcommand("make-sample", "Generate the synthetic sample face and scheme");
    c_sample->add_option("--vertices", sample.vertices, "Vertex count")->capture_default_str();
    c_sample->add_option("--mesh-out", sample.mesh_out, "Mesh output")->required();
    c_sample->add_option("--scheme-out", sample.scheme_out, "Landmark scheme output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_embed) return run_embed(embed);
        if (*c_deform) return run_deform(def);
        if (*c_fit) return run_fit(fit);
        if (*c_eval) return run_eval(ev);
        if (*c_bundle) return run_export_bundle(bun);
        if (*c_compare) return run_compare(cmp);
        if (*c_sample) return run_make_sample(sample);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
