#pragma once

#include <cstddef>

#include "ffd/landmarks.hpp"
#include "ffd/mesh.hpp"

namespace ffd {

struct SyntheticFace {
    Mesh mesh;
    LandmarkScheme scheme;
};

// Vertex count of the bundled sample face (data/sample_face.obj).
inline constexpr std::size_t kSampleFaceVertices = 35709;

// Deterministic face-like height field over an oval (millimetres, +z toward
// the viewer, +y up), triangulated as a row-major grid whose last row may be
// partial so any vertex_count >= 16 is hit exactly. Landmarks are the nearest
// free vertices to a fixed 68-point template in iBUG order.
SyntheticFace make_synthetic_face(std::size_t vertex_count = kSampleFaceVertices);

}  // namespace ffd
