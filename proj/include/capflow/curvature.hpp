#pragma once

#include <array>
#include <vector>

#include "capflow/fields.hpp"
#include "capflow/grid.hpp"

namespace capflow {

// Height-function curvature on 3x7 column stencils.
//
// Heights are liquid column sums h = delta_h * sum(alpha) in [0, 7*delta_h],
// taken along the direction closest to the interface normal. With that measure
// kappa = -h'' / (1 + h'^2)^{3/2} is positive wherever the liquid is convex,
// independent of which side of the column the liquid sits on.

inline constexpr int stencil_ghost = -1;

// Per-cell 3x7 stencils, entry (col, row) at col*7 + row. Vertical stencils have
// columns i-1..i+1 and rows j-3..j+3 (heights along y); horizontal stencils are
// the transpose (heights along x). Periodic wraps are baked in; entries that
// cross a non-periodic boundary hold stencil_ghost.
struct StencilTable {
    std::vector<std::array<int, 21>> vertical;
    std::vector<std::array<int, 21>> horizontal;
};

// Requires min(nx, ny) >= 7 so mirror folds stay inside the domain.
StencilTable precompute_stencils(const Grid& g);

enum class Orientation : char { vertical, horizontal };

// Largest normal component wins; a tie picks vertical.
Orientation select_orientation(Vec2 n);

// Column sums of a resolved 3x7 patch of volume fractions. Throws if any entry
// is negative (an unresolved ghost marker).
std::array<double, 3> compute_heights(const std::array<double, 21>& patch, double delta_h);

// delta_s is the spacing between the three columns.
double curvature_2d(const std::array<double, 3>& h, double delta_s);

// Out-of-plane curvature m_r / r_if of a surface of revolution, where m_r is
// the radial component of the unit normal pointing out of the liquid and r_if
// the interface radius. heights_radial: the heights run along r (columns along
// the axis), so m_r = radial_out / sqrt(1+h'^2) with radial_out = +-1 the sign
// of the out-of-liquid normal's radial component. Otherwise the heights run
// along the axis over radial columns and m_r = -h' / sqrt(1+h'^2); the column
// sums flip together with the liquid side, so no orientation factor appears
// and radial_out is ignored. Throws if r_if <= 0.
double curvature_axisymmetric(const std::array<double, 3>& h, double delta_s,
                              double r_if, double radial_out, bool heights_radial);

// Ghost column height below a wall for a static contact angle. theta_frame is
// measured against the wall plane in the stencil frame: 0 leaves the column
// flat, positive tilts the interface toward the ghost side.
double ghost_height_static(double h1, double delta, double theta_frame_rad);

struct DynamicGhost {
    double h0 = 0.0;          // ghost column height
    double theta_frame = 0.0; // atan((h0 - h1) / delta)
};

// Invert the 3-point curvature formula for the ghost height that reproduces
// kappa_target next to a wall. r_if <= 0 disables the out-of-plane term.
// Bisection on h0; throws if no root lies within 14*delta of h1.
DynamicGhost solve_ghost_height_dynamic(double kappa_target, double h1, double h2,
                                        double delta, double r_if, double radial_out,
                                        bool heights_radial = false);

struct CurvatureField {
    ScalarField kappa;
    std::vector<char> usable;
};

// Cell id after mirroring out-of-range indices across wall and symmetry
// patches (periodic ones wrap); -1 past an open boundary.
int fold_cell(const Grid& g, int i, int j);

// (s, t) wall frame: s runs along the wall, t away from it, t = 0 at the
// wall-adjacent row. Out-of-range s folds like fold_cell.
int frame_cell(const Grid& g, Side w, int s, int t);

// Imposed curvature at a cell, bypassing the stencil evaluation (used by the
// dynamic contact treatment).
struct ContactOverride {
    int cell = -1;
    double kappa = 0.0;
};

// Curvature at every cell near the 0.5 level of alpha. Ghost stencil entries
// behind walls and symmetry planes are mirror-filled; wall patches with a
// static contact angle get the angle-consistent ghost treatment at their
// contact cells. Cells whose stencils fail (saturated columns, open-boundary
// ghosts, |kappa| > 2/min(dx,dy)) copy the nearest usable value within two
// cells and stay unusable otherwise.
CurvatureField build_curvature(const Grid& g, const ScalarField& alpha,
                               const NormalField& normals, const StencilTable& table,
                               const std::vector<ContactOverride>& overrides = {});

// lambda * kappa[neighbour] + (1 - lambda) * kappa[owner]; throws if a needed
// value is unusable.
double face_curvature(const CurvatureField& cf, int owner, int neighbour, double lambda);

// Second-order interface normals from column-height slopes. Mixed cells whose
// three stencil columns bracket the interface get n rebuilt from dh/ds; all
// other cells keep the gradient normal passed in. The gradient normal still
// picks the column orientation and the dominant-axis sign.
NormalField refine_normals(const Grid& g, const StencilTable& table,
                           const ScalarField& alpha, NormalField nrm);

} // namespace capflow
