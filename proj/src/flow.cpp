#include "capflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "capflow/linear_solver.hpp"

namespace capflow {

MixtureFields mixture_properties(const ScalarField& alpha, const FluidPair& fluids) {
    const int n = alpha.size();
    MixtureFields m{ScalarField(n), ScalarField(n), ScalarField(n)};
    for (int c = 0; c < n; ++c) {
        const double a = std::clamp(alpha[c], 0.0, 1.0);
        m.rho[c] = a * fluids.rho_l + (1.0 - a) * fluids.rho_g;
        m.mu[c] = a * fluids.mu_l + (1.0 - a) * fluids.mu_g;
        m.beta[c] = 1.0 / m.rho[c];
    }
    return m;
}

double surface_tension_dt(const FluidPair& fluids, double dmin, double safety) {
    if (fluids.sigma <= 0.0) return std::numeric_limits<double>::infinity();
    // shortest capillary wave (k = pi/dmin) advanced at most one radian per step
    const double rho_bar = 0.5 * (fluids.rho_l + fluids.rho_g);
    return safety * std::sqrt(rho_bar * dmin * dmin * dmin / (4.0 * M_PI * fluids.sigma));
}

FlowState init_state(const Grid& g, const ScalarField& alpha0, const VectorField& v0) {
    FlowState s;
    s.alpha = alpha0;
    s.v = v0;
    s.p_d.assign(g.n_cells(), 0.0);
    s.phi = FaceField(static_cast<int>(g.faces.size()));
    for (int f = 0; f < s.phi.size(); ++f) {
        const Face& face = g.faces[f];
        Vec2 vf;
        if (face.neighbour >= 0) {
            vf = {0.5 * (v0[face.owner].x + v0[face.neighbour].x),
                  0.5 * (v0[face.owner].y + v0[face.neighbour].y)};
        } else if (g.patches[face.patch].kind == PatchKind::open) {
            vf = v0[face.owner];
        } else {
            continue; // walls and symmetry planes: no through-flow
        }
        s.phi[f] = (vf.x * face.normal.x + vf.y * face.normal.y) * face.area;
    }
    return s;
}

namespace {

double max_face_speed(const Grid& g, const FaceField& phi) {
    double m = 0.0;
    for (int f = 0; f < phi.size(); ++f)
        if (g.faces[f].area > 0.0) m = std::max(m, std::abs(phi[f]) / g.faces[f].area);
    return m;
}

struct Momentum {
    ScalarField a_P;   // 1/s
    VectorField expl;  // frozen part of H: v^n/dt, transposed shear, wall data
};

// Neighbour sum of the implicit parts (upwind inflow + normal diffusion) at
// the current iterate.
Vec2 implicit_nb(const Grid& g, const FaceField& phi, const FaceField& mu_f,
                 const MixtureFields& mix, const std::vector<std::vector<int>>& cell_faces,
                 const VectorField& v, int c) {
    Vec2 acc{};
    const double beta = mix.beta[c];
    const double vol = g.cell_volume(c);
    for (int f : cell_faces[c]) {
        const Face& face = g.faces[f];
        if (face.neighbour < 0) continue;
        const bool is_owner = face.owner == c;
        const int nb = is_owner ? face.neighbour : face.owner;
        const double out = is_owner ? phi[f] : -phi[f];
        const double dist = std::hypot(face.d.x, face.d.y);
        const double w = std::max(-out, 0.0) / vol + beta * mu_f[f] * face.area / (dist * vol);
        acc.x += w * v[nb].x;
        acc.y += w * v[nb].y;
    }
    return acc;
}

Momentum momentum_prepare(const Grid& g, const FaceField& phi, const FaceField& mu_f,
                          const MixtureFields& mix,
                          const std::vector<std::vector<int>>& cell_faces,
                          const VectorField& vn, double dt) {
    const int n = g.n_cells();
    Momentum m{ScalarField(n), VectorField(n)};

    // transposed shear, explicit from the step-start field
    ScalarField u(n), w(n);
    for (int c = 0; c < n; ++c) {
        u[c] = vn[c].x;
        w[c] = vn[c].y;
    }
    const VectorField gu = gradient(u, g);
    const VectorField gw = gradient(w, g);

    for (int c = 0; c < n; ++c) {
        const double vol = g.cell_volume(c);
        const double beta = mix.beta[c];
        double ap = 1.0 / dt;
        Vec2 ex{vn[c].x / dt, vn[c].y / dt};
        for (int f : cell_faces[c]) {
            const Face& face = g.faces[f];
            const bool is_owner = face.owner == c;
            const double sgn = is_owner ? 1.0 : -1.0;
            const double dist = std::hypot(face.d.x, face.d.y);
            if (face.neighbour >= 0) {
                ap += std::max(sgn * phi[f], 0.0) / vol +
                      mix.beta[c] * mu_f[f] * face.area / (dist * vol);
                // transposed term (grad v)^T . S, face value = gradient mean
                const int nb = is_owner ? face.neighbour : face.owner;
                const Vec2 gux{0.5 * (gu[c].x + gu[nb].x), 0.5 * (gu[c].y + gu[nb].y)};
                const Vec2 gwx{0.5 * (gw[c].x + gw[nb].x), 0.5 * (gw[c].y + gw[nb].y)};
                const double ax = sgn * face.normal.x * face.area;
                const double ay = sgn * face.normal.y * face.area;
                ex.x += beta * mu_f[f] * (gux.x * ax + gwx.x * ay) / vol;
                ex.y += beta * mu_f[f] * (gux.y * ax + gwx.y * ay) / vol;
            } else {
                const PatchSpec& p = g.patches[face.patch];
                if (p.kind == PatchKind::wall) {
                    // no-slip: implicit coefficient with the wall velocity as data
                    const double wcoef = beta * mix.mu[c] * face.area / (dist * vol);
                    ap += wcoef;
                    const Vec2 tangent = face.normal.x != 0.0 ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
                    ex.x += wcoef * p.wall_velocity * tangent.x;
                    ex.y += wcoef * p.wall_velocity * tangent.y;
                } else if (p.kind == PatchKind::open) {
                    ap += std::max(phi[f], 0.0) / vol; // inflow carries still fluid
                }
                // symmetry: zero shear, zero through-flow
            }
        }
        if (g.axisymmetric) {
            const double r = g.cell_center(c).x;
            ex.x -= beta * mix.mu[c] * vn[c].x / (r * r);
        }
        m.a_P[c] = ap;
        m.expl[c] = ex;
    }
    return m;
}

} // namespace

double compute_dt(const Grid& g, const FlowState& s, const FlowConfig& cfg, double dt_cap) {
    const double dmin = std::min(g.dx, g.dy);
    const double spd = max_face_speed(g, s.phi);
    double dt = dt_cap;
    if (spd > 0.0) dt = std::min(dt, std::min(cfg.co_max, 0.45) * dmin / spd);
    dt = std::min(dt, surface_tension_dt(cfg.fluids, dmin, cfg.dt_safety));
    const double nu_max = std::max(cfg.fluids.mu_l / cfg.fluids.rho_l,
                                   cfg.fluids.mu_g / cfg.fluids.rho_g);
    if (nu_max > 0.0) dt = std::min(dt, cfg.visc_safety * dmin * dmin / nu_max);
    if (!std::isfinite(dt))
        throw std::runtime_error("compute_dt: no time step limit applies; pass a finite cap");
    return dt;
}

StepReport advance(const Grid& g, const StencilTable& table, FlowState& s,
                   const FlowConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be positive");
    StepReport rep;
    rep.dt = dt;
    const int n = g.n_cells();

    {
        const NormalField nrm0 = refine_normals(
            g, table, s.alpha,
            interface_normal(smooth_alpha(s.alpha, g, cfg.alpha_smooth_iters), g));
        rep.advect = advect(s.alpha, s.phi, dt, g, nrm0, s.step % 2 == 0);
    }

    const MixtureFields mix = mixture_properties(s.alpha, cfg.fluids);
    FaceField mu_f = interpolate_to_faces(mix.mu, g);
    if (cfg.fluids.sigma > 0.0 && cfg.capillary_visc > 0.0) {
        // short capillary waves advance ~1 rad/step and see no physical
        // dissipation when mu = 0; this floor damps them at the grid scale
        for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
            const Face& face = g.faces[f];
            if (face.area <= 0.0) continue;
            const double rho_f = face.neighbour >= 0
                ? 0.5 * (mix.rho[face.owner] + mix.rho[face.neighbour])
                : mix.rho[face.owner];
            const double dist = std::hypot(face.d.x, face.d.y);
            mu_f[f] += cfg.capillary_visc * std::sqrt(rho_f * cfg.fluids.sigma * dist);
        }
    }
    const NormalField nrm = refine_normals(
        g, table, s.alpha,
        interface_normal(smooth_alpha(s.alpha, g, cfg.alpha_smooth_iters), g));

    std::vector<std::vector<int>> cell_faces(n);
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        cell_faces[g.faces[f].owner].push_back(f);
        if (g.faces[f].neighbour >= 0) cell_faces[g.faces[f].neighbour].push_back(f);
    }

    const Momentum mom = momentum_prepare(g, s.phi, mu_f, mix, cell_faces, s.v, dt);
    VectorField v = s.v;
    for (int sweep = 0; sweep < cfg.momentum_sweeps; ++sweep)
        for (int c = 0; c < n; ++c) {
            const Vec2 nb = implicit_nb(g, s.phi, mu_f, mix, cell_faces, v, c);
            v[c] = {(mom.expl[c].x + nb.x) / mom.a_P[c],
                    (mom.expl[c].y + nb.y) / mom.a_P[c]};
        }

    ScalarField inv_aP(n);
    for (int c = 0; c < n; ++c) inv_aP[c] = 1.0 / mom.a_P[c];

    const bool prescribed_kappa = !std::isnan(cfg.imposed_kappa);
    bool has_dynamic = false;
    for (const PatchSpec& p : g.patches)
        has_dynamic |= p.kind == PatchKind::wall && p.contact == ContactMode::dynamic;
    has_dynamic &= !prescribed_kappa;

    CurvatureField kap{ScalarField(n, cfg.imposed_kappa),
                       std::vector<char>(static_cast<size_t>(n), 1)};
    if (!prescribed_kappa) kap = build_curvature(g, s.alpha, nrm, table);
    std::vector<double> p = s.p_d;
    FaceField phi_new = s.phi;
    for (int k = 0; k < cfg.n_correctors; ++k) {
        VectorField hbya(n);
        for (int c = 0; c < n; ++c) {
            const Vec2 nb = implicit_nb(g, s.phi, mu_f, mix, cell_faces, v, c);
            hbya[c] = {(mom.expl[c].x + nb.x) / mom.a_P[c],
                       (mom.expl[c].y + nb.y) / mom.a_P[c]};
        }
        FaceField phiH(static_cast<int>(g.faces.size()));
        for (int f = 0; f < phiH.size(); ++f) {
            const Face& face = g.faces[f];
            Vec2 vf;
            if (face.neighbour >= 0) {
                vf = {0.5 * (hbya[face.owner].x + hbya[face.neighbour].x),
                      0.5 * (hbya[face.owner].y + hbya[face.neighbour].y)};
            } else if (g.patches[face.patch].kind == PatchKind::open) {
                vf = hbya[face.owner];
            } else {
                continue;
            }
            phiH[f] = (vf.x * face.normal.x + vf.y * face.normal.y) * face.area;
        }
        if (k == 0 && has_dynamic) {
            const DynamicContactResult dcr =
                dynamic_contact_overrides(g, s.alpha, nrm, inv_aP, phiH, s.p_d, cfg.fluids);
            kap = build_curvature(g, s.alpha, nrm, table, dcr.overrides);
            rep.contact_faces = dcr.faces;
        }
        const PressureAssembly sys =
            assemble_pressure_system(g, s.alpha, mix.beta, inv_aP, phiH, kap, cfg.fluids);
        const SolveStats st = solve_pressure(g, sys, p, cfg.p_tol);
        rep.pressure_iters += st.iterations;
        rep.pressure_residual = st.residual;
        phi_new = reconstruct_fluxes(g, sys, phiH, p);
        // cell velocities keep the momentum solution plus the face-averaged
        // projection correction; each face term vanishes at balanced rest
        v = hbya;
        for (int f = 0; f < phi_new.size(); ++f) {
            const Face& face = g.faces[f];
            if (face.area <= 0.0) continue;
            const double un = 0.5 * (phi_new[f] - phiH[f]) / face.area;
            const double cx = un * face.normal.x, cy = un * face.normal.y;
            v[face.owner].x += cx;
            v[face.owner].y += cy;
            if (face.neighbour >= 0) {
                v[face.neighbour].x += cx;
                v[face.neighbour].y += cy;
            }
        }
    }

    s.v = v;
    s.phi = phi_new;
    s.p_d = p;
    s.t += dt;
    ++s.step;
    rep.max_face_speed = max_face_speed(g, s.phi);
    return rep;
}

ScalarField total_pressure(const Grid& g, const FlowState& s, const FluidPair& fluids) {
    const MixtureFields mix = mixture_properties(s.alpha, fluids);
    ScalarField p(g.n_cells());
    for (int c = 0; c < g.n_cells(); ++c) {
        const Vec2 x = g.cell_center(c);
        p[c] = s.p_d[c] + mix.rho[c] * (fluids.gravity.x * x.x + fluids.gravity.y * x.y);
    }
    return p;
}

} // namespace capflow
