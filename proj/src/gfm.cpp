#include "capflow/gfm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace capflow {

double relative_position(double alpha_owner, double alpha_neighbour) {
    return (alpha_owner - 0.5) / (alpha_owner - alpha_neighbour);
}

std::vector<InterfacialFace> detect_interfacial_faces(const Grid& g, const ScalarField& alpha) {
    std::vector<InterfacialFace> out;
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        const Face& face = g.faces[f];
        if (face.neighbour < 0) continue;
        const double ao = alpha[face.owner], an = alpha[face.neighbour];
        if ((ao - 0.5) * (an - 0.5) >= 0.0) continue;
        InterfacialFace i;
        i.face = f;
        i.lambda = relative_position(ao, an);
        const Vec2 xo = g.cell_center(face.owner);
        i.x_f = {xo.x + i.lambda * face.d.x, xo.y + i.lambda * face.d.y};
        out.push_back(i);
    }
    return out;
}

double face_jump(bool owner_wet, double rho_l, double rho_g, Vec2 gravity, Vec2 x_f,
                 double sigma_kappa) {
    const double h = (rho_l - rho_g) * (gravity.x * x_f.x + gravity.y * x_f.y) + sigma_kappa;
    return owner_wet ? h : -h;
}

namespace {

// Sharp conductance across an interfacial face: the harmonic-style blend of
// the two phase betas about the crossing point.
double interfacial_beta(bool owner_wet, double lambda, double beta_l, double beta_g) {
    const double mix = owner_wet ? lambda * beta_g + (1.0 - lambda) * beta_l
                                 : lambda * beta_l + (1.0 - lambda) * beta_g;
    return beta_l * beta_g / mix;
}

} // namespace

PressureAssembly assemble_pressure_system(const Grid& g, const ScalarField& alpha,
                                          const ScalarField& beta_cell,
                                          const ScalarField& inv_aP,
                                          const FaceField& phiHbyA,
                                          const CurvatureField& kappa,
                                          const FluidPair& fluids) {
    const int n = g.n_cells();
    const int nf = static_cast<int>(g.faces.size());
    PressureAssembly sys;
    sys.diag.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    sys.a_face = FaceField(nf);
    sys.jump = FaceField(nf);
    sys.interfacial.assign(nf, 0);
    sys.lambda_face = FaceField(nf);

    const double beta_l = 1.0 / fluids.rho_l, beta_g = 1.0 / fluids.rho_g;
    bool has_open = false;

    for (int f = 0; f < nf; ++f) {
        const Face& face = g.faces[f];
        const double dist = std::hypot(face.d.x, face.d.y);
        if (face.neighbour >= 0) {
            const int O = face.owner, N = face.neighbour;
            const double ao = alpha[O], an = alpha[N];
            const double geom = 0.5 * (inv_aP[O] + inv_aP[N]) * face.area / dist;
            double a, H = 0.0;
            if ((ao - 0.5) * (an - 0.5) < 0.0) {
                const double lambda = relative_position(ao, an);
                const bool owner_wet = ao > 0.5;
                const Vec2 xo = g.cell_center(O);
                const Vec2 xf{xo.x + lambda * face.d.x, xo.y + lambda * face.d.y};
                const double kf = face_curvature(kappa, O, N, lambda);
                a = geom * interfacial_beta(owner_wet, lambda, beta_l, beta_g);
                H = face_jump(owner_wet, fluids.rho_l, fluids.rho_g, fluids.gravity, xf,
                              -fluids.sigma * kf);
                sys.interfacial[f] = 1;
                sys.lambda_face[f] = lambda;
            } else {
                a = geom * 0.5 * (beta_cell[O] + beta_cell[N]);
            }
            sys.a_face[f] = a;
            sys.jump[f] = H;
            sys.diag[O] += a;
            sys.diag[N] += a;
            const double t = phiHbyA[f] + a * H;
            sys.rhs[O] -= t;
            sys.rhs[N] += t;
        } else {
            const PatchSpec& p = g.patches[face.patch];
            if (p.kind == PatchKind::open) {
                has_open = true;
                const double a = inv_aP[face.owner] * face.area / dist * beta_cell[face.owner];
                sys.a_face[f] = a;
                sys.diag[face.owner] += a;
                sys.rhs[face.owner] -= phiHbyA[f];
            }
            // walls and symmetry planes carry no flux and no closure
        }
    }

    sys.singular = !has_open;
    if (sys.singular) {
        double mean = 0.0;
        for (double v : sys.rhs) mean += v;
        mean /= n;
        for (double& v : sys.rhs) v -= mean;
    }
    return sys;
}

FaceField reconstruct_fluxes(const Grid& g, const PressureAssembly& sys,
                             const FaceField& phiHbyA, const std::vector<double>& p) {
    const int nf = static_cast<int>(g.faces.size());
    FaceField phi(nf);
    for (int f = 0; f < nf; ++f) {
        const Face& face = g.faces[f];
        if (face.neighbour >= 0) {
            phi[f] = phiHbyA[f] -
                     sys.a_face[f] * (p[face.neighbour] - p[face.owner] - sys.jump[f]);
        } else if (g.patches[face.patch].kind == PatchKind::open) {
            phi[f] = phiHbyA[f] + sys.a_face[f] * p[face.owner];
        } else {
            phi[f] = 0.0;
        }
    }
    return phi;
}

DynamicContactResult dynamic_contact_overrides(const Grid& g, const ScalarField& alpha,
                                               const NormalField& normals,
                                               const ScalarField& inv_aP,
                                               const FaceField& phiHbyA,
                                               const std::vector<double>& p_prev,
                                               const FluidPair& fluids) {
    DynamicContactResult res;
    const double beta_l = 1.0 / fluids.rho_l, beta_g = 1.0 / fluids.rho_g;
    const double drho = fluids.rho_l - fluids.rho_g;

    for (int side = 0; side < 4; ++side) {
        const PatchSpec& p = g.patches[side];
        if (p.kind != PatchKind::wall || p.contact != ContactMode::dynamic) continue;
        const Side w = static_cast<Side>(side);
        const bool horiz_wall = w == side_bottom || w == side_top;
        const double dss = horiz_wall ? g.dx : g.dy;
        const double dtt = horiz_wall ? g.dy : g.dx;

        auto in_wall_row = [&](int c) {
            switch (w) {
                case side_bottom: return g.cj(c) == 0;
                case side_top: return g.cj(c) == g.ny - 1;
                case side_left: return g.ci(c) == 0;
                default: return g.ci(c) == g.nx - 1;
            }
        };

        for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
            const Face& face = g.faces[f];
            if (face.neighbour < 0) continue;
            if (!in_wall_row(face.owner) || !in_wall_row(face.neighbour)) continue;
            const double ao = alpha[face.owner], an = alpha[face.neighbour];
            if ((ao - 0.5) * (an - 0.5) >= 0.0) continue;

            // Only the crossing holding the liquid weight (wet cell on the
            // gravity side of the dry one) takes the momentum-balance jump;
            // the opposite crossing keeps the wall's static angle.
            const int wet = ao > 0.5 ? face.owner : face.neighbour;
            const int dry = ao > 0.5 ? face.neighbour : face.owner;
            const Vec2 xw = g.cell_center(wet), xd = g.cell_center(dry);
            if (fluids.gravity.x * (xw.x - xd.x) + fluids.gravity.y * (xw.y - xd.y) < 0.0)
                continue;

            const double lambda = relative_position(ao, an);
            const bool owner_wet = ao > 0.5;
            const Vec2 xo = g.cell_center(face.owner);
            const Vec2 xf{xo.x + lambda * face.d.x, xo.y + lambda * face.d.y};
            const double dist = std::hypot(face.d.x, face.d.y);
            const double a = 0.5 * (inv_aP[face.owner] + inv_aP[face.neighbour]) * face.area /
                             dist * interfacial_beta(owner_wet, lambda, beta_l, beta_g);
            const double head =
                p_prev[face.neighbour] - p_prev[face.owner] - phiHbyA[f] / a;
            const double gw = fluids.gravity.x * xf.x + fluids.gravity.y * xf.y;
            const double k_raw = owner_wet ? (head - drho * gw) / fluids.sigma
                                           : -(head + drho * gw) / fluids.sigma;
            DynamicContactFace dcf;
            dcf.face = f;
            dcf.cell_lo = face.owner;
            dcf.cell_hi = face.neighbour;
            dcf.kappa = -k_raw; // liquid-convex positive
            dcf.x_f = xf;
            res.overrides.push_back({face.owner, dcf.kappa});
            res.overrides.push_back({face.neighbour, dcf.kappa});

            // implied contact slope, from the column heights around the owner
            const int s0 = horiz_wall ? g.ci(face.owner) : g.cj(face.owner);
            double h[2] = {0.0, 0.0};
            bool ok = true;
            for (int t = 0; t <= 1 && ok; ++t)
                for (int k = -3; k <= 3; ++k) {
                    const int id = frame_cell(g, w, s0 + k, t);
                    if (id < 0) {
                        ok = false;
                        break;
                    }
                    h[t] += alpha[id] * dss;
                }
            dcf.theta_frame = std::numeric_limits<double>::quiet_NaN();
            dcf.h_ghost = std::numeric_limits<double>::quiet_NaN();
            if (ok) {
                double r_if = 0.0, radial_out = 0.0;
                bool heights_radial = false;
                if (g.axisymmetric) {
                    if (!horiz_wall) {
                        r_if = w == side_left ? g.origin.x + 0.5 * g.dx
                                              : g.origin.x + (g.nx - 0.5) * g.dx;
                    } else {
                        const double x_lo = g.origin.x + (s0 - 3) * g.dx;
                        const Vec2 nrm = normals.usable[face.owner] ? normals.n[face.owner]
                                                                    : Vec2{0.0, 0.0};
                        r_if = nrm.x < 0.0 ? x_lo + h[0] : x_lo + 7.0 * g.dx - h[0];
                        radial_out = nrm.x > 0.0 ? -1.0 : 1.0;
                        heights_radial = true;
                    }
                }
                try {
                    const DynamicGhost dg = solve_ghost_height_dynamic(dcf.kappa, h[0], h[1],
                                                                       dtt, r_if, radial_out,
                                                                       heights_radial);
                    dcf.h_ghost = dg.h0;
                    dcf.theta_frame = dg.theta_frame;
                } catch (const std::exception&) {
                    // diagnostics only; the imposed curvature stands
                }
            }
            res.faces.push_back(dcf);
        }
    }
    return res;
}

} // namespace capflow
