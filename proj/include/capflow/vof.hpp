#pragma once

#include <functional>

#include "capflow/fields.hpp"
#include "capflow/grid.hpp"

namespace capflow {

// Exact disc overlap per cell (planar area fraction), via corner-area
// inclusion-exclusion on the closed-form antiderivative of sqrt(R^2-x^2).
ScalarField init_circle_exact(const Grid& g, Vec2 center, double radius);

// Star-shaped region r <= radius(theta): per-cell polar overlap integral,
// adaptive Simpson split at cell-corner angles, |error| < 1e-12 * cell area.
ScalarField init_radial_shape(const Grid& g, Vec2 center,
                              const std::function<double(double)>& radius);

// Liquid occupies {x : m.x <= c} with m unit and pointing out of the liquid;
// cell is [0,dx]x[0,dy], c in the same frame. Returns area fraction in [0,1].
double plic_area_fraction(Vec2 m, double c, double dx, double dy);

// Inverse of plic_area_fraction in c, solved by bracketed bisection; the
// returned constant reproduces the fraction to 1e-12.
double plic_constant(Vec2 m, double fraction, double dx, double dy);

// Least-squares slope-candidate normals: per mixed cell, six candidate slopes
// from one-sided and central differences of 3x3 column sums (both
// orientations); the line that best re-integrates the block wins. Exact for
// planar interfaces. The seed supplies orientation signs and stays in place
// wherever the block crosses an open boundary or the seed is unusable.
NormalField slope_fit_normals(const Grid& g, const ScalarField& alpha, NormalField seed);

struct AdvectReport {
    double clipped_volume = 0.0;   // net liquid volume removed by final clipping
    double redistributed = 0.0;    // clipped volume returned to mixed cells
    double max_overshoot = 0.0;    // max |alpha - [0,1]| before clipping
    int wisps_rounded = 0;         // mixed cells with unusable normals rounded
    double wisp_volume_moved = 0.0;
};

// One transport step: two directionally split geometric sweeps (PLIC donor
// slabs) with the divergence correction c*(div phi)*dt, c = [alpha^n > 1/2]
// frozen across both sweeps; sweep order given by x_first. Fluxes must be
// discretely divergence-free and per-sweep Courant <= 0.5 (throws otherwise,
// naming the face). Inflow boundary faces carry inflow_alpha.
AdvectReport advect(ScalarField& alpha, const FaceField& phi, double dt,
                    const Grid& g, const NormalField& normals, bool x_first,
                    double inflow_alpha = 0.0);

// Rounds mixed cells whose interface normal is unusable to {0,1}, moving the
// liquid difference into the nearest mixed neighbour (largest gradient).
int round_wisps(ScalarField& alpha, const NormalField& normals, const Grid& g,
                double* volume_moved = nullptr);

} // namespace capflow
