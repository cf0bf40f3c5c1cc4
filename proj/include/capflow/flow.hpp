#pragma once

#include <limits>
#include <vector>

#include "capflow/curvature.hpp"
#include "capflow/fields.hpp"
#include "capflow/gfm.hpp"
#include "capflow/grid.hpp"
#include "capflow/vof.hpp"

namespace capflow {

struct MixtureFields {
    ScalarField rho, mu, beta; // beta = 1/rho, cell mixture values
};

MixtureFields mixture_properties(const ScalarField& alpha, const FluidPair& fluids);

// Capillary wave limit safety * sqrt(rho_bar dmin^3 / (pi sigma)),
// rho_bar = (rho_l + rho_g)/2. Infinite when sigma = 0.
double surface_tension_dt(const FluidPair& fluids, double dmin, double safety);

struct FlowConfig {
    FluidPair fluids;
    double co_max = 0.2;
    double dt_safety = 0.9;   // capillary limit factor
    double visc_safety = 0.25;
    int n_correctors = 3;
    int momentum_sweeps = 4;
    double p_tol = 1e-12;
    int alpha_smooth_iters = 2;
    // Grid-scale momentum dissipation, as a fraction of sqrt(rho sigma dx).
    // Scales like a viscosity and shrinks as dx^{3/2} under refinement.
    double capillary_visc = 0.0078125;
    // Uniform prescribed interface curvature [1/m]; NaN computes it from
    // column heights. Overrides the contact-angle machinery as well.
    double imposed_kappa = std::numeric_limits<double>::quiet_NaN();
};

struct FlowState {
    ScalarField alpha;
    VectorField v;
    FaceField phi; // volumetric face fluxes, divergence-free
    std::vector<double> p_d;
    double t = 0.0;
    long step = 0;
};

// Face fluxes from the cell velocities (two-point mean; zero across walls and
// symmetry planes), p_d = 0.
FlowState init_state(const Grid& g, const ScalarField& alpha0, const VectorField& v0);

// min over the convective, capillary, and explicit-shear limits; never above
// dt_cap. Throws if no limit binds and dt_cap is not finite.
double compute_dt(const Grid& g, const FlowState& s, const FlowConfig& cfg, double dt_cap);

struct StepReport {
    double dt = 0.0;
    AdvectReport advect;
    int pressure_iters = 0;       // summed over correctors
    double pressure_residual = 0.0;
    double max_face_speed = 0.0;  // after the step
    std::vector<DynamicContactFace> contact_faces;
};

// One time step: sharp-interface transport with the step-start fluxes, then a
// segregated velocity update (upwind convection and normal diffusion implicit
// via fixed-point sweeps, transposed shear explicit) closed by pressure
// correctors that carry the interface jumps on the faces. Gravity acts only
// through those jumps; p_d excludes the per-phase hydrostatic field.
StepReport advance(const Grid& g, const StencilTable& table, FlowState& s,
                   const FlowConfig& cfg, double dt);

// Diagnostic total pressure p_d + rho_cell (g . x).
ScalarField total_pressure(const Grid& g, const FlowState& s, const FluidPair& fluids);

} // namespace capflow
