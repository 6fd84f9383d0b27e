#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "ffd/evaluation.hpp"
#include "ffd/fitting.hpp"
#include "ffd/lattice.hpp"
#include "ffd/pose.hpp"

// JSON forms of every on-disk artifact. Doubles are written in shortest
// round-trip form, so a load of a save reproduces the exact bit patterns.
namespace ffd {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& doc, const std::filesystem::path& path, int indent = -1);

Json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const Json& doc);

// {"dims", "degree", "kind", "box": {"origin", "lengths"}, "axis_map", "points"}
Json lattice_to_json(const ControlGrid& grid);
ControlGrid lattice_from_json(const Json& doc);

// {"delta": [[dx, dy, dz], ...]}
Json field_to_json(const DeformationField& field);
DeformationField field_from_json(const Json& doc);

// {"scale", "rotation", "translation"}; {"matrix": 3x4} is accepted on input
// and projected onto the nearest scaled rotation.
Json pose_to_json(const Pose& pose);
Pose pose_from_json(const Json& doc);

// {"vertex": w, "regions": {"contour": w, ...}}; missing keys keep `base`.
Json weights_to_json(const LossWeights& w);
LossWeights weights_from_json(const Json& doc, const LossWeights& base = {});

Json loss_report_to_json(const LossReport& r);

// Self-contained parameterization: mesh, lattice and per-vertex (s, t, u).
// Coefficients are rebuilt from the parameters on load.
Json parameterization_to_json(const ParameterizedMesh& pm);
ParameterizedMesh parameterization_from_json(const Json& doc);

// {"pred": [[x,y,z] x68], "gt": [...], "box": [w, h], "yaw": deg}
EvalRecord record_from_json(const Json& doc);
Json record_to_json(const EvalRecord& r);
// One record per non-empty line; errors carry the 1-based line number.
std::vector<EvalRecord> load_records_jsonl(const std::filesystem::path& path);

Json table_to_json(const NmeTable& t);
Json comparison_to_json(const KindComparison& cmp);

}  // namespace ffd
