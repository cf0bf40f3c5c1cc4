#pragma once

#include <array>
#include <string>
#include <vector>

#include "capflow/vec2.hpp"

namespace capflow {

enum class PatchKind { wall, symmetry, open, periodic };
enum class ContactMode { none, static_angle, dynamic };

enum Side : int { side_left = 0, side_right = 1, side_bottom = 2, side_top = 3 };

struct PatchSpec {
    std::string name;
    PatchKind kind = PatchKind::symmetry;
    ContactMode contact = ContactMode::none;
    double contact_angle_deg = 90.0;  // static mode only
    double wall_velocity = 0.0;       // tangential, wall patches only
};

// Interior faces connect owner -> neighbour with owner < neighbour; for the
// periodic wrap face d is the geometric offset through the wrap. Boundary
// faces have neighbour = -1 and patch >= 0.
struct Face {
    int owner = -1;
    int neighbour = -1;
    Vec2 normal;     // unit, owner -> neighbour (outward at boundaries)
    double area = 0; // axisymmetric: per radian (radius-weighted)
    Vec2 center;
    Vec2 d;          // x_N - x_O, wrap-aware; x_face - x_O at boundaries
    int patch = -1;  // side index, -1 interior
    bool wrap = false;
};

// Uniform structured grid, cells row-major (index = j*nx + i). Faces are
// enumerated x-faces then y-faces, row-major, boundary faces in line.
struct Grid {
    int nx = 0, ny = 0;
    double dx = 0, dy = 0;
    Vec2 origin;                 // lower-left corner; axisymmetric: origin.x = inner radius
    bool axisymmetric = false;
    std::array<PatchSpec, 4> patches;
    std::vector<Face> faces;
    int n_interior_faces = 0;    // count, not a contiguous range

    int n_cells() const { return nx * ny; }
    int cell(int i, int j) const { return j * nx + i; }
    int ci(int c) const { return c % nx; }
    int cj(int c) const { return c / nx; }

    Vec2 cell_center(int c) const {
        return {origin.x + (ci(c) + 0.5) * dx, origin.y + (cj(c) + 0.5) * dy};
    }
    // Axisymmetric volumes are per radian: r_c*dx*dy.
    double cell_volume(int c) const {
        double v = dx * dy;
        if (axisymmetric) v *= origin.x + (ci(c) + 0.5) * dx;
        return v;
    }

    bool periodic_x() const { return patches[side_left].kind == PatchKind::periodic; }
    bool periodic_y() const { return patches[side_bottom].kind == PatchKind::periodic; }

    // Outward face-area sum per cell; axisymmetric grids include the implicit
    // azimuthal wedge contribution so closure holds exactly.
    Vec2 cell_closure(int c) const;
};

// Throws std::invalid_argument on non-positive extents, nx/ny < 3, an
// axisymmetric grid reaching r < 0 or combined with x-periodicity, or a
// periodic patch without its partner.
Grid build_grid(int nx, int ny, double lx, double ly, Vec2 origin = {},
                bool axisymmetric = false,
                std::array<PatchSpec, 4> patches = {
                    PatchSpec{"left"}, PatchSpec{"right"},
                    PatchSpec{"bottom"}, PatchSpec{"top"}});

// Owner-to-neighbour distance vector of an interior face; throws on boundary faces.
Vec2 face_distance(const Grid& g, int f);

} // namespace capflow
