#include "ffd/sample_face.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ffd/error.hpp"

namespace ffd {

namespace {

constexpr double kHalfWidth = 70.0;
constexpr double kHalfHeight = 95.0;

double bump(double x, double y, double cx, double cy, double sx, double sy) {
    double dx = (x - cx) / sx;
    double dy = (y - cy) / sy;
    return std::exp(-0.5 * (dx * dx + dy * dy));
}

double face_depth(double x, double y) {
    double nx = x / kHalfWidth;
    double ny = y / kHalfHeight;
    double r2 = nx * nx + ny * ny;
    double z = 55.0 * std::sqrt(std::max(0.0, 1.0 - 0.85 * r2));
    z += 22.0 * bump(x, y, 0.0, -12.0, 6.0, 14.0);  // nose ridge
    z += 6.0 * bump(x, y, 0.0, -15.0, 5.0, 5.0);    // nose tip
    for (double side : {-1.0, 1.0}) {
        z -= 8.0 * bump(x, y, side * 32.0, 25.0, 11.0, 6.0);  // eye socket
        z += 4.0 * bump(x, y, side * 30.0, 40.0, 16.0, 4.0);  // brow ridge
        z += 3.0 * bump(x, y, side * 42.0, -20.0, 12.0, 12.0);  // cheek
    }
    z += 5.0 * bump(x, y, 0.0, -45.0, 18.0, 5.0);   // lips
    z -= 1.5 * bump(x, y, 0.0, -48.0, 16.0, 1.0);   // mouth line
    z += 4.0 * bump(x, y, 0.0, -78.0, 14.0, 8.0);   // chin
    return z;
}

// 2D landmark template in iBUG-68 order (x to the viewer's right, y up).
std::vector<std::array<double, 2>> landmark_template() {
    std::vector<std::array<double, 2>> t;
    constexpr double pi = 3.14159265358979323846;
    for (int k = 0; k <= 16; ++k) {
        double phi = pi + pi * k / 16.0;
        t.push_back({60.0 * std::cos(phi), 15.0 + 95.0 * std::sin(phi)});
    }
    for (int k = 0; k < 5; ++k) {
        double u = k / 4.0;
        t.push_back({-52.0 + 38.0 * u, 38.0 + 5.0 * std::sin(pi * u)});
    }
    for (int k = 0; k < 5; ++k) {
        double u = k / 4.0;
        t.push_back({14.0 + 38.0 * u, 38.0 + 5.0 * std::sin(pi * u)});
    }
    for (double y : {26.0, 16.0, 6.0, -4.0}) t.push_back({0.0, y});
    t.insert(t.end(), {{-13, -16}, {-7, -18}, {0, -19}, {7, -18}, {13, -16}});
    t.insert(t.end(), {{-44, 25}, {-36, 29}, {-28, 29}, {-20, 25}, {-28, 21}, {-36, 21}});
    t.insert(t.end(), {{20, 25}, {28, 29}, {36, 29}, {44, 25}, {36, 21}, {28, 21}});
    t.insert(t.end(), {{-25, -46}, {-17, -40}, {-8, -37}, {0, -38}, {8, -37}, {17, -40},
                       {25, -46}, {17, -53}, {8, -56}, {0, -57}, {-8, -56}, {-17, -53}});
    t.insert(t.end(), {{-20, -46}, {-8, -43}, {0, -43}, {8, -43}, {20, -46}, {8, -49},
                       {0, -49}, {-8, -49}});
    return t;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

SyntheticFace make_synthetic_face(std::size_t vertex_count) {
    if (vertex_count < 16) throw DomainError("synthetic face needs at least 16 vertices");

    const auto width = static_cast<std::size_t>(std::ceil(std::sqrt(double(vertex_count))));
    const std::size_t rows = (vertex_count + width - 1) / width;
    const std::size_t last_len = vertex_count - (rows - 1) * width;
    if (last_len < 2) throw DomainError("vertex count leaves a degenerate last grid row");

    Mesh mesh;
    mesh.vertices.reserve(vertex_count);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t len = r + 1 == rows ? last_len : width;
        double b = -1.0 + 2.0 * double(r) / double(rows - 1);
        for (std::size_t c = 0; c < len; ++c) {
            double a = -1.0 + 2.0 * double(c) / double(width - 1);
            // Square-to-disc map keeps the grid regular inside an oval outline.
            double x = kHalfWidth * a * std::sqrt(1.0 - 0.5 * b * b);
            double y = kHalfHeight * b * std::sqrt(1.0 - 0.5 * a * a);
            mesh.vertices.emplace_back(round_to(x, 1e-4), round_to(y, 1e-4),
                                       round_to(face_depth(x, y), 1e-4));
        }
    }

    auto id = [width](std::size_t r, std::size_t c) { return std::uint32_t(r * width + c); };
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        std::size_t upper_len = r + 2 == rows ? last_len : width;
        for (std::size_t c = 0; c + 1 < width; ++c) {
            if (c + 1 < upper_len) {
                mesh.faces.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1)});
                mesh.faces.push_back({id(r, c), id(r + 1, c + 1), id(r + 1, c)});
            } else if (c + 1 == upper_len) {
                mesh.faces.push_back({id(r, c), id(r, c + 1), id(r + 1, c)});
            }
        }
    }
    mesh.validate();

    std::vector<bool> used(mesh.size(), false);
    std::vector<std::uint32_t> picks;
    for (const auto& [tx, ty] : landmark_template()) {
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::uint32_t v = 0; v < mesh.size(); ++v) {
            if (used[v]) continue;
            double dx = mesh.vertices[v].x() - tx;
            double dy = mesh.vertices[v].y() - ty;
            double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        used[best] = true;
        picks.push_back(best);
    }
    return {std::move(mesh), LandmarkScheme::from_ibug_order(picks)};
}

}  // namespace ffd
