#pragma once

#include <vector>

#include "capflow/grid.hpp"
#include "capflow/vec2.hpp"

namespace capflow {

// Cell-centered scalar, row-major like the grid.
struct ScalarField {
    std::vector<double> data;
    ScalarField() = default;
    explicit ScalarField(int n, double v = 0.0) : data(n, v) {}
    double& operator[](int c) { return data[c]; }
    double operator[](int c) const { return data[c]; }
    int size() const { return static_cast<int>(data.size()); }
};

struct VectorField {
    std::vector<Vec2> data;
    VectorField() = default;
    explicit VectorField(int n, Vec2 v = {}) : data(n, v) {}
    Vec2& operator[](int c) { return data[c]; }
    Vec2 operator[](int c) const { return data[c]; }
    int size() const { return static_cast<int>(data.size()); }
};

// One value per grid face, same enumeration as Grid::faces. For fluxes the
// sign convention is owner -> neighbour (outward at boundaries).
struct FaceField {
    std::vector<double> data;
    FaceField() = default;
    explicit FaceField(int n, double v = 0.0) : data(n, v) {}
    double& operator[](int f) { return data[f]; }
    double operator[](int f) const { return data[f]; }
    int size() const { return static_cast<int>(data.size()); }
};

// Compact Green-Gauss gradient (1/V) sum_f (f_face - f_P) S_f; exact for
// affine fields on interior uniform cells, exact zero for constants on any
// metric. Boundary faces use the zero-gradient value; periodic wraps.
VectorField gradient(const ScalarField& f, const Grid& g);

// Arithmetic two-point face mean; boundary faces copy the owner cell.
FaceField interpolate_to_faces(const ScalarField& f, const Grid& g);

// (1/V) sum_f sgn phi_f of a face flux field.
ScalarField divergence(const FaceField& phi, const Grid& g);

// n_iters passes of cell->face mean followed by face->cell mean. Preserves
// bounds; preserves the sum on fully periodic grids.
ScalarField smooth_alpha(const ScalarField& alpha, const Grid& g, int n_iters);

struct NormalField {
    VectorField n;            // unit, points from gas into liquid (grad alpha direction)
    std::vector<char> usable; // |grad| above threshold
};

// Unit normals of the smoothed fraction field; a gradient magnitude below
// 1e-8/min(dx,dy) marks the cell unusable.
NormalField interface_normal(const ScalarField& alpha_s, const Grid& g);

// Cell velocity from face fluxes: per-direction mean of the two opposing
// face normal velocities. Exact for uniform velocity; O(dx^2) for affine.
VectorField reconstruct_cell_velocity(const FaceField& phi, const Grid& g);

} // namespace capflow
