#include "ffd/serialize.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "ffd/error.hpp"

namespace ffd {

namespace {

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw DomainError("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json points_to_json(const std::vector<Vec3>& pts) {
    Json arr = Json::array();
    for (const auto& p : pts) arr.push_back(vec_to_json(p));
    return arr;
}

std::vector<Vec3> points_from_json(const Json& j) {
    std::vector<Vec3> out;
    out.reserve(j.size());
    for (const auto& p : j) out.push_back(vec_from_json(p));
    return out;
}

constexpr std::array<const char*, 3> kAxisNames = {"x", "y", "z"};

int axis_from_json(const Json& j) {
    if (j.is_number_integer()) return j.get<int>();
    const auto s = j.get<std::string>();
    for (int a = 0; a < 3; ++a) {
        if (s == kAxisNames[a]) return a;
    }
    throw DomainError("unknown axis '" + s + "'");
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

void write_json_file(const Json& doc, const std::filesystem::path& path, int indent) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(indent) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Json mesh_to_json(const Mesh& mesh) {
    Json faces = Json::array();
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    return {{"vertices", points_to_json(mesh.vertices)}, {"faces", std::move(faces)}};
}

Mesh mesh_from_json(const Json& doc) {
    Mesh mesh;
    mesh.vertices = points_from_json(doc.at("vertices"));
    const auto& faces = doc.at("faces");
    mesh.faces.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (faces[f].size() != 3) throw DomainError("face " + std::to_string(f) + " is not a triangle");
        mesh.faces.push_back({faces[f][0].get<std::uint32_t>(), faces[f][1].get<std::uint32_t>(),
                              faces[f][2].get<std::uint32_t>()});
    }
    mesh.validate();
    return mesh;
}

Json lattice_to_json(const ControlGrid& grid) {
    const auto& c = grid.config;
    Json axis_map = Json::array();
    for (int a : c.axis_map) axis_map.push_back(kAxisNames[a]);
    return {{"dims", c.dims},
            {"degree", c.kind.is_bspline() ? c.kind.degree : 0},
            {"kind", c.kind.is_bspline() ? "bspline" : "bernstein"},
            {"box", {{"origin", vec_to_json(c.origin)}, {"lengths", vec_to_json(c.lengths)}}},
            {"axis_map", std::move(axis_map)},
            {"points", points_to_json(grid.points)}};
}

ControlGrid lattice_from_json(const Json& doc) {
    LatticeConfig c;
    c.dims = doc.at("dims").get<Dims>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "bspline") {
        c.kind = BasisKind::bspline(doc.value("degree", 3));
    } else if (kind == "bernstein") {
        c.kind = BasisKind::bernstein();
    } else {
        throw DomainError("unknown lattice kind '" + kind + "'");
    }
    c.origin = vec_from_json(doc.at("box").at("origin"));
    c.lengths = vec_from_json(doc.at("box").at("lengths"));
    if (doc.contains("axis_map")) {
        for (int a = 0; a < 3; ++a) c.axis_map[a] = axis_from_json(doc["axis_map"].at(a));
    }
    c.validate();
    ControlGrid grid{c, {}};
    if (doc.contains("points")) {
        grid.points = points_from_json(doc["points"]);
        if (grid.points.size() != c.control_point_count()) {
            throw DimensionError("lattice lists " + std::to_string(grid.points.size()) +
                                 " points, dims imply " + std::to_string(c.control_point_count()));
        }
    } else {
        grid = ControlGrid::uniform(c);
    }
    return grid;
}

Json field_to_json(const DeformationField& field) { return {{"delta", points_to_json(field.delta)}}; }

DeformationField field_from_json(const Json& doc) {
    DeformationField f{points_from_json(doc.at("delta"))};
    for (std::size_t i = 0; i < f.delta.size(); ++i) {
        if (!f.delta[i].allFinite()) {
            throw DomainError("deformation entry " + std::to_string(i) + " is not finite");
        }
    }
    return f;
}

Json pose_to_json(const Pose& pose) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r) {
        rot.push_back({pose.rotation(r, 0), pose.rotation(r, 1), pose.rotation(r, 2)});
    }
    return {{"scale", pose.scale}, {"rotation", std::move(rot)},
            {"translation", vec_to_json(pose.translation)}};
}

Pose pose_from_json(const Json& doc) {
    if (doc.contains("matrix")) {
        Mat34 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = doc["matrix"].at(r).at(c).get<double>();
        return Pose::from_matrix(m);
    }
    Pose p;
    p.scale = doc.at("scale").get<double>();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) p.rotation(r, c) = doc.at("rotation").at(r).at(c).get<double>();
    p.translation = vec_from_json(doc.at("translation"));
    p.validate();
    return p;
}

Json weights_to_json(const LossWeights& w) {
    Json regions = Json::object();
    for (auto r : kAllRegions) regions[std::string(region_name(r))] = w.region(r);
    return {{"vertex", w.vertex}, {"regions", std::move(regions)}};
}

LossWeights weights_from_json(const Json& doc, const LossWeights& base) {
    LossWeights w = base;
    if (doc.contains("vertex")) w.vertex = doc["vertex"].get<double>();
    if (doc.contains("regions")) {
        for (const auto& [key, value] : doc["regions"].items()) {
            auto r = region_from_name(key);
            if (!r) throw DomainError("unknown landmark region '" + key + "' in weights");
            w.regions[static_cast<std::size_t>(*r)] = value.get<double>();
        }
    }
    w.validate();
    return w;
}

Json loss_report_to_json(const LossReport& r) {
    Json regions = Json::object();
    for (auto reg : kAllRegions) regions[std::string(region_name(reg))] = r.region(reg);
    return {{"vertex", r.vertex_loss},
            {"vertex_term_active", r.vertex_term_active},
            {"regions", std::move(regions)},
            {"total", r.total}};
}

Json parameterization_to_json(const ParameterizedMesh& pm) {
    return {{"version", 1},
            {"mesh", mesh_to_json(pm.mesh)},
            {"lattice", lattice_to_json(pm.grid)},
            {"params", points_to_json(pm.params)},
            {"max_residual", pm.max_residual}};
}

ParameterizedMesh parameterization_from_json(const Json& doc) {
    if (doc.value("version", 0) != 1) throw DomainError("unsupported parameterization version");
    return assemble(mesh_from_json(doc.at("mesh")), lattice_from_json(doc.at("lattice")),
                    points_from_json(doc.at("params")));
}

EvalRecord record_from_json(const Json& doc) {
    EvalRecord r;
    const auto& pred = doc.at("pred");
    const auto& gt = doc.at("gt");
    if (pred.size() != kLandmarkCount || gt.size() != kLandmarkCount) {
        throw DomainError("records need 68 predicted and 68 ground-truth landmarks");
    }
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        r.pred[k] = vec_from_json(pred[k]);
        r.gt[k] = vec_from_json(gt[k]);
    }
    const auto& box = doc.at("box");
    r.box_width = box.at(0).get<double>();
    r.box_height = box.at(1).get<double>();
    if (!(r.box_width > 0.0) || !(r.box_height > 0.0)) throw DomainError("box must have positive size");
    r.yaw = doc.at("yaw").get<double>();
    return r;
}

Json record_to_json(const EvalRecord& r) {
    Json pred = Json::array(), gt = Json::array();
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        pred.push_back(vec_to_json(r.pred[k]));
        gt.push_back(vec_to_json(r.gt[k]));
    }
    return {{"pred", std::move(pred)}, {"gt", std::move(gt)},
            {"box", {r.box_width, r.box_height}}, {"yaw", r.yaw}};
}

std::vector<EvalRecord> load_records_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<EvalRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(Json::parse(line)));
        } catch (const Json::exception& e) {
            throw ParseError(std::string("malformed record: ") + e.what(), line_no);
        } catch (const DomainError& e) {
            throw ParseError(std::string("invalid record: ") + e.what(), line_no);
        }
    }
    if (out.empty()) throw DomainError(path.string() + " contains no records");
    return out;
}

Json table_to_json(const NmeTable& t) {
    Json bins = Json::array();
    for (std::size_t b = 0; b < kYawBins; ++b) {
        bins.push_back({{"range", kYawBinLabels[b]},
                        {"nme_percent", t.bins[b] ? Json(*t.bins[b]) : Json(nullptr)},
                        {"count", t.counts[b]}});
    }
    return {{"bins", std::move(bins)}, {"mean_percent", t.mean}, {"warnings", t.warnings}};
}

Json comparison_to_json(const KindComparison& cmp) {
    auto result = [](const KindResult& r) {
        return Json{{"losses", loss_report_to_json(r.report)},
                    {"objective", r.objective},
                    {"landmark_nme_percent", 100.0 * r.landmark_nme},
                    {"surface_rmse", r.surface_rmse}};
    };
    auto aggregate = [](const KindAggregate& a, double reference) {
        return Json{{"mean_nme_percent", 100.0 * a.mean_nme},
                    {"mean_surface_rmse", a.mean_surface_rmse},
                    {"mean_total_loss", a.mean_total_loss},
                    {"reference_nme_percent", reference}};
    };
    Json targets = Json::array();
    for (const auto& t : cmp.targets) {
        targets.push_back({{"bspline", result(t.bspline)}, {"bernstein", result(t.bernstein)}});
    }
    return {{"targets", std::move(targets)},
            {"bspline", aggregate(cmp.bspline, kReferenceNmeBSpline)},
            {"bernstein", aggregate(cmp.bernstein, kReferenceNmeBernstein)}};
}

}  // namespace ffd
