#pragma once

#include <functional>
#include <vector>

#include "capflow/flow.hpp"

namespace capflow {

enum class CaseKind {
    static_prescribed, // exactly initialized droplet held by a uniform prescribed curvature
    static_laplace,    // quarter droplet relaxing to equilibrium under computed curvature
    translating,       // droplet carried by a uniform velocity field, periodic in x
    oscillating,       // inviscid capillary mode-2 oscillation
    rising_bubble,     // buoyant bubble in a dense liquid
    sessile,           // semicircular droplet relaxing to a prescribed wall angle
    suspended_2d,      // droplet hanging on a vertical fiber, planar
    suspended_axisym,  // droplet hanging on a vertical fiber, axisymmetric
};

// Knobs that vary inside a family; everything else is pinned per kind.
struct CaseConfig {
    CaseKind kind = CaseKind::static_laplace;
    int resolution = 20;      // cells per droplet diameter
    double laplace = 1200.0;  // static_laplace: sets sigma = La mu^2 / (rho D)
    double sigma = 0.0;       // suspended kinds only; <= 0 keeps the per-kind default
    double theta_deg = 90.0;  // sessile wall angle
    double fiber_d = 1e-4;    // m, suspended_axisym fiber diameter
    double t_end = 0.0;       // s; <= 0 keeps the per-kind default
    int sample_every = 1;     // diagnostics cadence in steps
};

// A fully resolved run: grid, solver settings, initial fields, stop time, and
// the reference values the metrics compare against (NaN where not applicable).
struct CaseSetup {
    CaseConfig config;
    Grid grid;
    FlowConfig flow;
    ScalarField alpha0;
    VectorField v0;
    double t_end = 0.0;
    double diameter = 0.0;
    Vec2 center;  // initial droplet/bubble center
    Vec2 v_drift; // reference-frame velocity subtracted from velocity metrics
    double kappa_exact = std::numeric_limits<double>::quiet_NaN(); // 1/m
    double jump_exact = std::numeric_limits<double>::quiet_NaN();  // Pa
    double omega_exact = std::numeric_limits<double>::quiet_NaN(); // rad/s
    double theta_target = std::numeric_limits<double>::quiet_NaN(); // deg
    double v_sigma = std::numeric_limits<double>::quiet_NaN(); // m/s, sqrt(sigma/(rho_l D))
    bool track_shape = false; // emit alpha error rows against alpha0
};

CaseSetup make_case(const CaseConfig& cfg);

struct Dimensionless {
    double laplace = std::numeric_limits<double>::quiet_NaN();
    double capillary = std::numeric_limits<double>::quiet_NaN();
    double weber = std::numeric_limits<double>::quiet_NaN();
    double eotvos = std::numeric_limits<double>::quiet_NaN();
};

// ref_speed feeds Weber; max_speed feeds the capillary number. Groups whose
// inputs vanish come back NaN.
Dimensionless dimensionless_numbers(const FluidPair& fluids, double diameter,
                                    double max_speed, double ref_speed);

double max_speed(const VectorField& v, Vec2 drift = {});
double rms_speed(const VectorField& v, Vec2 drift = {}); // sqrt(mean |v|^2)

double liquid_volume(const Grid& g, const ScalarField& alpha);

// max |kappa_c - kappa_exact| / |kappa_exact| over mixed cells, recomputing
// curvature from the instantaneous field (smooth_iters as in the flow config).
double curvature_error_linf(const Grid& g, const ScalarField& alpha,
                            const StencilTable& table, double kappa_exact,
                            int smooth_iters);

struct ShapeError {
    double l2 = 0.0;   // sqrt(sum (alpha - ref)^2 / n_cells)
    double linf = 0.0; // max |alpha - ref|
};
ShapeError shape_error(const ScalarField& alpha, const ScalarField& ref);

// mean p over alpha > 0.9 minus mean p over alpha < 0.1; NaN if a side is empty.
double pressure_jump(const ScalarField& alpha, const std::vector<double>& p);

struct BubbleMetrics {
    double y_c = 0.0;  // gas-weighted centroid height
    double v_c = 0.0;  // gas-weighted rise velocity
    double circularity = 0.0; // pi D_eq / perimeter
};
BubbleMetrics bubble_metrics(const Grid& g, const ScalarField& alpha, const VectorField& v);

// Maximum x of the interface crossings interpolated on interior faces.
double interface_max_x(const Grid& g, const ScalarField& alpha);

// Angular frequency from the mean spacing of the first four prominent maxima
// of x(t). Throws if fewer than three full periods are detected.
double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& x);

struct SessileShape {
    double radius = 0.0; // apparent cap radius
    double height = 0.0; // apex height above the wall
    double spread = 0.0; // wetted length on the wall
};
// Circular-cap equilibrium for a semicircle of radius r0 relaxing to theta.
SessileShape sessile_analytics(double r0, double theta_deg);

double droplet_height(const Grid& g, const ScalarField& alpha); // max column sum
double wetted_length(const Grid& g, const ScalarField& alpha);  // bottom-row sum

// Equilibrium fiber contact angle (degrees) from the weight balance:
// planar cos(theta) = rho_l g pi R^2 / (2 sigma), axisymmetric
// cos(theta) = 4 rho_l g R^3 / (3 sigma d_f). Throws when the droplet is too
// heavy to suspend (cos >= 1).
double suspension_theta(const FluidPair& fluids, double radius, double fiber_d,
                        bool axisym);

// log2(e_coarse / e_fine) between successive mesh halvings.
double convergence_order(double e_coarse, double e_fine);

// One diagnostics sample; NaN marks a metric the case does not produce.
struct DiagRow {
    double t = std::numeric_limits<double>::quiet_NaN();
    double dt = std::numeric_limits<double>::quiet_NaN();
    double max_v = std::numeric_limits<double>::quiet_NaN();
    double capillary = std::numeric_limits<double>::quiet_NaN();
    double rms_v_nd = std::numeric_limits<double>::quiet_NaN();
    double linf_kappa = std::numeric_limits<double>::quiet_NaN();
    double l2_shape = std::numeric_limits<double>::quiet_NaN();
    double linf_shape = std::numeric_limits<double>::quiet_NaN();
    double p_jump = std::numeric_limits<double>::quiet_NaN();
    double y_c = std::numeric_limits<double>::quiet_NaN();
    double v_c = std::numeric_limits<double>::quiet_NaN();
    double circularity = std::numeric_limits<double>::quiet_NaN();
    double x_extent = std::numeric_limits<double>::quiet_NaN();
    double theta_star = std::numeric_limits<double>::quiet_NaN();
};

// Pure function of the state for the field metrics; dt and theta_star are
// loop-side values carried into the row (pass NaN when recomputing from a
// saved snapshot).
DiagRow measure_row(const CaseSetup& setup, const StencilTable& table,
                    const FlowState& s, double dt, double theta_star);

// Physical wall angle (degrees) at the weight-bearing contact face of the
// last step, NaN when the step produced none.
double contact_theta(const StepReport& rep);

struct RunResult {
    std::vector<DiagRow> rows;
    FlowState state; // final
    double liquid_volume0 = 0.0;
    double liquid_volume_end = 0.0;
    double theta_star_mean = std::numeric_limits<double>::quiet_NaN(); // trailing tenth
};

using SnapshotSink = std::function<void(const Grid&, const FlowState&, int)>;

// init -> dt loop -> advance, sampling a DiagRow every sample_every steps
// (plus the initial and final states). n_snapshots > 0 emits evenly spaced
// field snapshots through sink, index 0 at t = 0.
RunResult run_case(const CaseSetup& setup, int n_snapshots = 0,
                   const SnapshotSink& sink = {});

} // namespace capflow
