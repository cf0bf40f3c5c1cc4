#include "capflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace capflow {

StencilTable precompute_stencils(const Grid& g) {
    if (std::min(g.nx, g.ny) < 7)
        throw std::invalid_argument("precompute_stencils: grid must be at least 7 cells wide");
    StencilTable t;
    t.vertical.resize(g.n_cells());
    t.horizontal.resize(g.n_cells());
    auto resolve = [&](int ii, int jj) {
        if (g.periodic_x()) ii = ((ii % g.nx) + g.nx) % g.nx;
        if (g.periodic_y()) jj = ((jj % g.ny) + g.ny) % g.ny;
        if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) return stencil_ghost;
        return g.cell(ii, jj);
    };
    for (int c = 0; c < g.n_cells(); ++c) {
        const int i = g.ci(c), j = g.cj(c);
        for (int col = 0; col < 3; ++col)
            for (int row = 0; row < 7; ++row) {
                t.vertical[c][col * 7 + row] = resolve(i + col - 1, j + row - 3);
                t.horizontal[c][col * 7 + row] = resolve(i + row - 3, j + col - 1);
            }
    }
    return t;
}

Orientation select_orientation(Vec2 n) {
    return std::abs(n.y) >= std::abs(n.x) ? Orientation::vertical : Orientation::horizontal;
}

std::array<double, 3> compute_heights(const std::array<double, 21>& patch, double delta_h) {
    std::array<double, 3> h{};
    for (int col = 0; col < 3; ++col) {
        const double* a = patch.data() + col * 7;
        for (int row = 0; row < 7; ++row)
            if (a[row] < 0.0)
                throw std::invalid_argument("compute_heights: unresolved ghost entry");
        // palindromic pairing keeps the sum bitwise stable under column reversal
        const double sum = ((a[0] + a[6]) + (a[1] + a[5])) + ((a[2] + a[4]) + a[3]);
        h[col] = sum * delta_h;
    }
    return h;
}

double curvature_2d(const std::array<double, 3>& h, double delta_s) {
    // (h0 + h2) first: bitwise symmetric under end-column swap
    const double hpp = ((h[0] + h[2]) - 2.0 * h[1]) / (delta_s * delta_s);
    const double hp = (h[2] - h[0]) / (2.0 * delta_s);
    return -hpp / std::pow(1.0 + hp * hp, 1.5);
}

double curvature_axisymmetric(const std::array<double, 3>& h, double delta_s,
                              double r_if, double radial_out, bool heights_radial) {
    if (!(r_if > 0.0))
        throw std::runtime_error("curvature_axisymmetric: interface reaches the axis");
    const double hp = (h[2] - h[0]) / (2.0 * delta_s);
    const double den = std::sqrt(1.0 + hp * hp);
    const double m_r = heights_radial ? radial_out / den : -hp / den;
    return m_r / r_if;
}

double ghost_height_static(double h1, double delta, double theta_frame_rad) {
    return h1 + delta * std::tan(theta_frame_rad);
}

DynamicGhost solve_ghost_height_dynamic(double kappa_target, double h1, double h2,
                                        double delta, double r_if, double radial_out,
                                        bool heights_radial) {
    if (!(delta > 0.0)) throw std::invalid_argument("solve_ghost_height_dynamic: bad spacing");
    auto residual = [&](double h0) {
        const std::array<double, 3> h{h0, h1, h2};
        double k = curvature_2d(h, delta);
        if (r_if > 0.0) k += curvature_axisymmetric(h, delta, r_if, radial_out, heights_radial);
        return k - kappa_target;
    };
    double span = 7.0 * delta;
    for (int attempt = 0; attempt < 2; ++attempt, span *= 2.0) {
        const double lo = h1 - span, hi = h1 + span;
        constexpr int nscan = 256;
        double a = lo, fa = residual(a);
        for (int k = 1; k <= nscan; ++k) {
            const double b = lo + (hi - lo) * k / nscan;
            const double fb = residual(b);
            if (fa == 0.0 || fa * fb < 0.0) {
                double x0 = a, x1 = b, f0 = fa;
                for (int it = 0; it < 200; ++it) {
                    const double xm = 0.5 * (x0 + x1);
                    const double fm = residual(xm);
                    if (std::abs(fm) < 1e-10 / delta) {
                        x0 = x1 = xm;
                        break;
                    }
                    if (f0 * fm <= 0.0) {
                        x1 = xm;
                    } else {
                        x0 = xm;
                        f0 = fm;
                    }
                }
                DynamicGhost r;
                r.h0 = 0.5 * (x0 + x1);
                r.theta_frame = std::atan((r.h0 - h1) / delta);
                return r;
            }
            a = b;
            fa = fb;
        }
    }
    throw std::runtime_error("solve_ghost_height_dynamic: no ghost height within 14*delta");
}

namespace {

constexpr int fold_fail = std::numeric_limits<int>::min();

int fold_1d(int idx, int n, const PatchSpec& lo, const PatchSpec& hi, bool periodic) {
    if (periodic) return ((idx % n) + n) % n;
    for (int guard = 0; guard < 4 && (idx < 0 || idx >= n); ++guard) {
        if (idx < 0) {
            if (lo.kind == PatchKind::open) return fold_fail;
            idx = -1 - idx; // walls and symmetry planes mirror
        } else {
            if (hi.kind == PatchKind::open) return fold_fail;
            idx = 2 * n - 1 - idx;
        }
    }
    return (idx < 0 || idx >= n) ? fold_fail : idx;
}

} // namespace

int fold_cell(const Grid& g, int i, int j) {
    i = fold_1d(i, g.nx, g.patches[side_left], g.patches[side_right], g.periodic_x());
    j = fold_1d(j, g.ny, g.patches[side_bottom], g.patches[side_top], g.periodic_y());
    if (i == fold_fail || j == fold_fail) return -1;
    return g.cell(i, j);
}

int frame_cell(const Grid& g, Side w, int s, int t) {
    int i, j;
    switch (w) {
        case side_bottom: i = s; j = t; break;
        case side_top: i = s; j = g.ny - 1 - t; break;
        case side_left: i = t; j = s; break;
        default: i = g.nx - 1 - t; j = s; break;
    }
    return fold_cell(g, i, j);
}

namespace {

struct KappaProbe {
    double kappa = 0.0;
    bool ok = false;
};

// Stencil fractions for cell c; ghost entries mirror-fill across wall and
// symmetry patches. False past an open boundary.
bool gather_patch(const Grid& g, const StencilTable& table, const ScalarField& alpha,
                  int c, bool vert, std::array<double, 21>& patch) {
    const auto& ids = (vert ? table.vertical : table.horizontal)[c];
    const int i = g.ci(c), j = g.cj(c);
    for (int k = 0; k < 21; ++k) {
        int id = ids[k];
        if (id == stencil_ghost) {
            const int col = k / 7 - 1, row = k % 7 - 3;
            id = fold_cell(g, i + (vert ? col : row), j + (vert ? row : col));
            if (id < 0) return false;
        }
        patch[k] = alpha[id];
    }
    return true;
}

KappaProbe standard_kappa(const Grid& g, const StencilTable& table, const ScalarField& alpha,
                          Vec2 n, int c) {
    KappaProbe out;
    const Orientation o = select_orientation(n);
    const bool vert = o == Orientation::vertical;
    const int i = g.ci(c);
    std::array<double, 21> patch{};
    if (!gather_patch(g, table, alpha, c, vert, patch)) return out;
    const double dh = vert ? g.dy : g.dx; // height measure
    const double ds = vert ? g.dx : g.dy; // column spacing
    const auto h = compute_heights(patch, dh);
    const double htol = 1e-10 * dh;
    for (double hc : h)
        if (hc <= htol || hc >= 7.0 * dh - htol) return out; // interface exits the window
    double kp = curvature_2d(h, ds);
    if (g.axisymmetric) {
        if (vert) {
            const double r_if = g.origin.x + (i + 0.5) * g.dx;
            kp += curvature_axisymmetric(h, ds, r_if, 0.0, false);
        } else {
            const double x_lo = g.origin.x + (i - 3) * g.dx;
            const double r_if = n.x < 0.0 ? x_lo + h[1] : x_lo + 7.0 * g.dx - h[1];
            const double radial_out = n.x > 0.0 ? -1.0 : 1.0;
            kp += curvature_axisymmetric(h, ds, r_if, radial_out, true);
        }
    }
    out.kappa = kp;
    out.ok = true;
    return out;
}

KappaProbe contact_kappa(const Grid& g, const ScalarField& alpha, Vec2 n, int c, Side w,
                         double theta_deg) {
    KappaProbe out;
    const bool horiz_wall = w == side_bottom || w == side_top;
    const int s0 = horiz_wall ? g.ci(c) : g.cj(c);
    const double dss = horiz_wall ? g.dx : g.dy; // along the wall
    const double dtt = horiz_wall ? g.dy : g.dx; // away from the wall
    const double th = theta_deg * M_PI / 180.0;
    const Vec2 t_hat = w == side_bottom   ? Vec2{0.0, 1.0}
                       : w == side_top    ? Vec2{0.0, -1.0}
                       : w == side_left   ? Vec2{1.0, 0.0}
                                          : Vec2{-1.0, 0.0};
    const Vec2 m{-n.x, -n.y}; // out of the liquid

    if (theta_deg >= 45.0 && theta_deg <= 135.0) {
        // interface meets the wall steeply: heights along the wall, the sub-wall
        // ghost column encodes the contact slope dh/dt = cot(theta)
        std::array<double, 3> h{};
        for (int t = 0; t <= 1; ++t) {
            double sum = 0.0;
            for (int k = -3; k <= 3; ++k) {
                const int id = frame_cell(g, w, s0 + k, t);
                if (id < 0) return out;
                sum += alpha[id];
            }
            h[1 + t] = sum * dss;
        }
        const double htol = 1e-10 * dss;
        for (int t = 1; t <= 2; ++t)
            if (h[t] <= htol || h[t] >= 7.0 * dss - htol) return out;
        h[0] = ghost_height_static(h[1], dtt, M_PI / 2.0 - th);
        double kp = curvature_2d(h, dtt);
        if (g.axisymmetric) {
            if (horiz_wall) {
                const double x_lo = g.origin.x + (s0 - 3) * g.dx;
                const double r_if = n.x < 0.0 ? x_lo + h[1] : x_lo + 7.0 * g.dx - h[1];
                const double radial_out = n.x > 0.0 ? -1.0 : 1.0;
                kp += curvature_axisymmetric(h, dtt, r_if, radial_out, true);
            } else {
                const double r_if = w == side_left ? g.origin.x + 0.5 * g.dx
                                                   : g.origin.x + (g.nx - 0.5) * g.dx;
                kp += curvature_axisymmetric(h, dtt, r_if, 0.0, false);
            }
        }
        out.kappa = kp;
        out.ok = true;
        return out;
    }

    // interface nearly parallel to the wall: heights off the wall; a dry column
    // past the contact line is rebuilt from the contact slope dh/ds = -tan(theta)
    std::array<double, 3> h{};
    for (int k = -1; k <= 1; ++k) {
        double sum = 0.0;
        for (int t = 0; t < 7; ++t) {
            const int id = frame_cell(g, w, s0 + k, t);
            if (id < 0) return out;
            sum += alpha[id];
        }
        h[1 + k] = sum * dtt;
    }
    const double htol = 1e-10 * dtt;
    if (h[1] <= htol || h[1] >= 7.0 * dtt - htol) return out;
    const bool dry_lo = h[0] <= htol, dry_hi = h[2] <= htol;
    if (dry_lo && dry_hi) return out;
    if (dry_lo)
        h[0] = h[1] - dss * std::tan(th);
    else if (dry_hi)
        h[2] = h[1] - dss * std::tan(th);
    if (!dry_lo && h[0] >= 7.0 * dtt - htol) return out;
    if (!dry_hi && h[2] >= 7.0 * dtt - htol) return out;
    double kp = curvature_2d(h, dss);
    if (g.axisymmetric) {
        if (horiz_wall) {
            const double r_if = g.origin.x + (s0 + 0.5) * g.dx;
            kp += curvature_axisymmetric(h, dss, r_if, 0.0, false);
        } else {
            const bool liquid_at_wall = m.x * t_hat.x + m.y * t_hat.y >= 0.0;
            const double tau = liquid_at_wall ? h[1] : 7.0 * dtt - h[1];
            const double r_if = w == side_left ? g.origin.x + tau
                                               : g.origin.x + g.nx * g.dx - tau;
            const double radial_out = n.x > 0.0 ? -1.0 : 1.0;
            kp += curvature_axisymmetric(h, dss, r_if, radial_out, true);
        }
    }
    out.kappa = kp;
    out.ok = true;
    return out;
}

} // namespace

CurvatureField build_curvature(const Grid& g, const ScalarField& alpha,
                               const NormalField& normals, const StencilTable& table,
                               const std::vector<ContactOverride>& overrides) {
    const int n = g.n_cells();
    CurvatureField cf{ScalarField(n), std::vector<char>(n, 0)};
    constexpr double amin = 1e-6;
    const double cap = 2.0 / std::min(g.dx, g.dy);

    std::vector<char> near(n, 0);
    for (int c = 0; c < n; ++c) {
        const double a = alpha[c];
        if (a > amin && a < 1.0 - amin) {
            near[c] = 1;
            continue;
        }
        const int i = g.ci(c), j = g.cj(c);
        const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (auto& q : nb) {
            const int id = fold_cell(g, q[0], q[1]);
            if (id >= 0 && (alpha[id] - 0.5) * (a - 0.5) < 0.0) {
                near[c] = 1;
                break;
            }
        }
    }

    std::vector<double> imposed(n, std::numeric_limits<double>::quiet_NaN());
    for (const ContactOverride& o : overrides) {
        if (o.cell < 0 || o.cell >= n)
            throw std::invalid_argument("build_curvature: override cell out of range");
        imposed[o.cell] = o.kappa;
        near[o.cell] = 1;
    }

    std::vector<char> pinned(n, 0);
    for (int c = 0; c < n; ++c) {
        if (!near[c]) continue;
        if (!std::isnan(imposed[c])) {
            cf.kappa[c] = imposed[c];
            cf.usable[c] = 1;
            pinned[c] = 1;
            continue;
        }
        if (!normals.usable[c]) continue;
        const int i = g.ci(c), j = g.cj(c);
        int wall = -1;
        const bool mixed = alpha[c] > amin && alpha[c] < 1.0 - amin;
        if (mixed) {
            const Side sides[4] = {side_bottom, side_top, side_left, side_right};
            const bool adj[4] = {j == 0, j == g.ny - 1, i == 0, i == g.nx - 1};
            for (int s = 0; s < 4; ++s) {
                const PatchSpec& p = g.patches[sides[s]];
                // dynamic walls fall back to their static angle at cells the
                // momentum-balance override did not claim
                if (adj[s] && p.kind == PatchKind::wall &&
                    p.contact != ContactMode::none) {
                    wall = sides[s];
                    break;
                }
            }
        }
        const KappaProbe probe =
            wall >= 0 ? contact_kappa(g, alpha, normals.n[c], c, static_cast<Side>(wall),
                                      g.patches[wall].contact_angle_deg)
                      : standard_kappa(g, table, alpha, normals.n[c], c);
        if (probe.ok && std::abs(probe.kappa) <= cap) {
            cf.kappa[c] = probe.kappa;
            cf.usable[c] = 1;
            pinned[c] = wall >= 0;
        }
    }

    // interface-weighted neighbour averaging quells probe noise on transported
    // fronts; contact and override cells stay pinned and radiate outward.
    // Pairwise x-then-y accumulation keeps the filter bitwise mirror-safe.
    constexpr int kFilterPasses = 4;
    std::vector<double> w(n, 0.0);
    for (int c = 0; c < n; ++c) {
        const double a = std::clamp(alpha[c], 0.0, 1.0);
        w[c] = a * (1.0 - a);
    }
    for (int pass = 0; pass < kFilterPasses; ++pass) {
        const ScalarField prev = cf.kappa;
        for (int c = 0; c < n; ++c) {
            if (!cf.usable[c] || pinned[c]) continue;
            const int i = g.ci(c), j = g.cj(c);
            auto term = [&](int ii, int jj) {
                const int id = fold_cell(g, ii, jj);
                if (id < 0 || !cf.usable[id]) return std::pair<double, double>{0.0, 0.0};
                return std::pair<double, double>{w[id] * prev[id], w[id]};
            };
            const auto we = term(i - 1, j), ea = term(i + 1, j);
            const auto so = term(i, j - 1), no = term(i, j + 1);
            const double num =
                (w[c] * prev[c] + (we.first + ea.first)) + (so.first + no.first);
            const double den =
                (w[c] + (we.second + ea.second)) + (so.second + no.second);
            if (den > 0.0) cf.kappa[c] = num / den;
        }
    }

    // failed cells inherit the nearest trusted value, fixed search order
    struct Off {
        int d2, dj, di;
    };
    std::vector<Off> offs;
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
            if (di || dj) offs.push_back({di * di + dj * dj, dj, di});
    std::sort(offs.begin(), offs.end(), [](const Off& a, const Off& b) {
        return std::tie(a.d2, a.dj, a.di) < std::tie(b.d2, b.dj, b.di);
    });
    std::vector<std::pair<int, double>> copies;
    for (int c = 0; c < n; ++c) {
        if (!near[c] || cf.usable[c]) continue;
        for (const Off& o : offs) {
            const int id = fold_cell(g, g.ci(c) + o.di, g.cj(c) + o.dj);
            if (id >= 0 && cf.usable[id]) {
                copies.emplace_back(c, cf.kappa[id]);
                break;
            }
        }
    }
    for (auto& [c, v] : copies) {
        cf.kappa[c] = v;
        cf.usable[c] = 1;
    }
    return cf;
}

double face_curvature(const CurvatureField& cf, int owner, int neighbour, double lambda) {
    if (!cf.usable[owner] || !cf.usable[neighbour])
        throw std::runtime_error("face_curvature: no usable curvature at cells " +
                                 std::to_string(owner) + "/" + std::to_string(neighbour));
    return lambda * cf.kappa[neighbour] + (1.0 - lambda) * cf.kappa[owner];
}

NormalField refine_normals(const Grid& g, const StencilTable& table,
                           const ScalarField& alpha, NormalField nrm) {
    std::array<double, 21> patch{};
    for (int c = 0; c < g.n_cells(); ++c) {
        if (!nrm.usable[c]) continue;
        if (alpha[c] <= 0.0 || alpha[c] >= 1.0) continue;
        const bool vert = select_orientation(nrm.n[c]) == Orientation::vertical;
        if (!gather_patch(g, table, alpha, c, vert, patch)) continue;
        const double dh = vert ? g.dy : g.dx;
        const double ds = vert ? g.dx : g.dy;
        const auto h = compute_heights(patch, dh);
        const double htol = 1e-10 * dh;
        bool bracketed = true;
        for (double hc : h) bracketed &= hc > htol && hc < 7.0 * dh - htol;
        if (!bracketed) continue;
        double hp = (h[2] - h[0]) / (2.0 * ds);
        // widen to a 5-column least-squares slope when the flanking cells'
        // windows (same transverse row, so heights share the base) bracket too
        {
            const int i = g.ci(c), j = g.cj(c);
            const int cl = vert ? (i > 0 ? g.cell(i - 1, j) : -1)
                                : (j > 0 ? g.cell(i, j - 1) : -1);
            const int cr = vert ? (i + 1 < g.nx ? g.cell(i + 1, j) : -1)
                                : (j + 1 < g.ny ? g.cell(i, j + 1) : -1);
            std::array<double, 21> side{};
            if (cl >= 0 && cr >= 0 && gather_patch(g, table, alpha, cl, vert, side)) {
                const double h0 = compute_heights(side, dh)[0];
                if (gather_patch(g, table, alpha, cr, vert, side)) {
                    const double h4 = compute_heights(side, dh)[2];
                    const bool outer = h0 > htol && h0 < 7.0 * dh - htol &&
                                       h4 > htol && h4 < 7.0 * dh - htol;
                    if (outer)
                        hp = (2.0 * (h4 - h0) + (h[2] - h[0])) / (10.0 * ds);
                }
            }
        }
        const double inv = 1.0 / std::sqrt(1.0 + hp * hp);
        // column sums measure the liquid thickness from either window end, so
        // the transverse component is hp * inv for both normal polarities
        if (vert) {
            const double s = nrm.n[c].y >= 0.0 ? inv : -inv;
            nrm.n[c] = {hp * inv, s};
        } else {
            const double s = nrm.n[c].x >= 0.0 ? inv : -inv;
            nrm.n[c] = {s, hp * inv};
        }
    }
    return nrm;
}

} // namespace capflow
