#include "capflow/vof.hpp"

#include "capflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace capflow {

namespace {

// Antiderivative of sqrt(R^2 - t^2), clamped outside [-R, R].
double disc_F(double t, double R) {
    const double s = std::clamp(t / R, -1.0, 1.0);
    return 0.5 * R * R * (s * std::sqrt(1.0 - s * s) + std::asin(s));
}

// Area of {x^2 + y^2 <= R^2} intersected with {x <= a, y <= b}.
double disc_corner_area(double a, double b, double R) {
    if (a <= -R || b <= -R) return 0.0;
    const double A = std::min(a, R);
    if (b >= R) return 2.0 * (disc_F(A, R) - disc_F(-R, R));
    const double xb = std::sqrt(std::max(0.0, R * R - b * b));
    double area = 0.0;
    if (b >= 0.0) {
        const double p1 = std::min(A, -xb);
        if (p1 > -R) area += 2.0 * (disc_F(p1, R) - disc_F(-R, R));
        if (A > -xb) {
            const double hi = std::min(A, xb);
            area += disc_F(hi, R) - disc_F(-xb, R) + b * (hi + xb);
        }
        if (A > xb) area += 2.0 * (disc_F(A, R) - disc_F(xb, R));
    } else {
        const double hi = std::min(A, xb);
        if (hi > -xb) area += disc_F(hi, R) - disc_F(-xb, R) + b * (hi + xb);
    }
    return area;
}

} // namespace

ScalarField init_circle_exact(const Grid& g, Vec2 center, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("init_circle_exact: radius must be positive");
    ScalarField a(g.n_cells());
    for (int c = 0; c < g.n_cells(); ++c) {
        const double x1 = g.origin.x + g.ci(c) * g.dx - center.x;
        const double y1 = g.origin.y + g.cj(c) * g.dy - center.y;
        const double x2 = x1 + g.dx, y2 = y1 + g.dy;
        const double area = disc_corner_area(x2, y2, radius) - disc_corner_area(x1, y2, radius) -
                            disc_corner_area(x2, y1, radius) + disc_corner_area(x1, y1, radius);
        a[c] = std::clamp(area / (g.dx * g.dy), 0.0, 1.0);
    }
    return a;
}

namespace {

struct RaySpan {
    double t0 = 0.0, t1 = 0.0;
    bool hit = false;
};

// Entry/exit parameters of the ray t*(c,s), t >= 0, through [x1,x2]x[y1,y2].
RaySpan ray_rect(double c, double s, double x1, double x2, double y1, double y2) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    auto slab = [&](double d, double b1, double b2) {
        if (std::abs(d) < 1e-300) {
            if (b1 > 0.0 || b2 < 0.0) hi = -1.0;
            return;
        }
        double ta = b1 / d, tb = b2 / d;
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
    };
    slab(c, x1, x2);
    slab(s, y1, y2);
    RaySpan r;
    if (hi > lo) {
        r.t0 = lo;
        r.t1 = hi;
        r.hit = true;
    }
    return r;
}

struct SimpsonCtx {
    const std::function<double(double)>* f;
    int evals = 0;
};

double adaptive_simpson(SimpsonCtx& ctx, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = (*ctx.f)(lm), frm = (*ctx.f)(rm);
    ctx.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    SimpsonCtx ctx{&f};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(ctx, a, b, fa, fm, fb, whole, tol, 42);
}

} // namespace

ScalarField init_radial_shape(const Grid& g, Vec2 center,
                              const std::function<double(double)>& radius) {
    constexpr int kSamples = 4096;
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, maxstep = 0.0;
    double prev = radius(0.0);
    for (int k = 1; k <= kSamples; ++k) {
        const double r = radius(2.0 * M_PI * k / kSamples);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        maxstep = std::max(maxstep, std::abs(r - prev));
        prev = r;
    }
    if (!(rmin > 0.0)) throw std::invalid_argument("init_radial_shape: radius must stay positive");
    const double margin = 2.0 * maxstep + 1e-12 * rmax;

    ScalarField a(g.n_cells());
    const double cell_area = g.dx * g.dy;
    for (int c = 0; c < g.n_cells(); ++c) {
        const double x1 = g.origin.x + g.ci(c) * g.dx - center.x;
        const double y1 = g.origin.y + g.cj(c) * g.dy - center.y;
        const double x2 = x1 + g.dx, y2 = y1 + g.dy;
        const double ddx = std::max({x1, -x2, 0.0});
        const double ddy = std::max({y1, -y2, 0.0});
        const double dmin = std::hypot(ddx, ddy);
        double dmax = 0.0;
        for (double xc : {x1, x2})
            for (double yc : {y1, y2}) dmax = std::max(dmax, std::hypot(xc, yc));
        if (dmax <= rmin - margin) {
            a[c] = 1.0;
            continue;
        }
        if (dmin >= rmax + margin) {
            a[c] = 0.0;
            continue;
        }

        auto integrand = [&](double th) {
            const RaySpan sp = ray_rect(std::cos(th), std::sin(th), x1, x2, y1, y2);
            if (!sp.hit) return 0.0;
            const double R = radius(th);
            if (R <= sp.t0) return 0.0;
            const double te = std::min(sp.t1, R);
            return 0.5 * (te * te - sp.t0 * sp.t0);
        };
        const std::function<double(double)> fi = integrand;

        const bool inside = x1 <= 0.0 && x2 >= 0.0 && y1 <= 0.0 && y2 >= 0.0;
        double total = 0.0;
        const double tol = 1e-12 * cell_area;
        if (inside) {
            double ang[4] = {std::atan2(y1, x1), std::atan2(y1, x2), std::atan2(y2, x1),
                             std::atan2(y2, x2)};
            std::sort(ang, ang + 4);
            for (int k = 0; k < 4; ++k) {
                const double a0 = ang[k];
                const double a1 = k + 1 < 4 ? ang[k + 1] : ang[0] + 2.0 * M_PI;
                total += integrate(fi, a0, a1, 0.25 * tol);
            }
        } else {
            const double thc = std::atan2(0.5 * (y1 + y2), 0.5 * (x1 + x2));
            double ang[4];
            int k = 0;
            for (double xc : {x1, x2})
                for (double yc : {y1, y2}) {
                    double t = std::atan2(yc, xc);
                    while (t < thc - M_PI) t += 2.0 * M_PI;
                    while (t > thc + M_PI) t -= 2.0 * M_PI;
                    ang[k++] = t;
                }
            std::sort(ang, ang + 4);
            for (int s = 0; s < 3; ++s)
                total += integrate(fi, ang[s], ang[s + 1], tol / 3.0);
        }
        a[c] = std::clamp(total / cell_area, 0.0, 1.0);
    }
    return a;
}

namespace {

// Canonical fraction with mx, my >= 0, cell [0,w]x[0,h], liquid {mx x + my y <= c}.
double plic_fraction_canonical(double mx, double my, double c, double w, double h) {
    const double S = mx * w + my * h;
    if (S <= 0.0) return 0.0;
    if (c <= 0.0) return 0.0;
    if (c >= S) return 1.0;
    const double tiny = 1e-14 * S;
    if (mx * w <= tiny) return std::clamp(c / (my * h), 0.0, 1.0);
    if (my * h <= tiny) return std::clamp(c / (mx * w), 0.0, 1.0);
    double area2 = c * c; // 2 * mx * my * area
    double t = c - mx * w;
    if (t > 0.0) area2 -= t * t;
    t = c - my * h;
    if (t > 0.0) area2 -= t * t;
    return std::clamp(area2 / (2.0 * mx * my * w * h), 0.0, 1.0);
}

} // namespace

double plic_area_fraction(Vec2 m, double c, double dx, double dy) {
    double mx = m.x, my = m.y, cc = c;
    if (mx < 0.0) {
        mx = -mx;
        cc += mx * dx;
    }
    if (my < 0.0) {
        my = -my;
        cc += my * dy;
    }
    return plic_fraction_canonical(mx, my, cc, dx, dy);
}

double plic_constant(Vec2 m, double fraction, double dx, double dy) {
    const double mx = std::abs(m.x), my = std::abs(m.y);
    const double S = mx * dx + my * dy;
    if (S <= 0.0) throw std::invalid_argument("plic_constant: zero normal");
    double c;
    if (fraction <= 0.0) {
        c = 0.0;
    } else if (fraction >= 1.0) {
        c = S;
    } else {
        double lo = 0.0, hi = S;
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            (plic_fraction_canonical(mx, my, mid, dx, dy) < fraction ? lo : hi) = mid;
        }
        c = 0.5 * (lo + hi);
    }
    if (m.x < 0.0) c -= mx * dx;
    if (m.y < 0.0) c -= my * dy;
    return c;
}

namespace {

enum PlicKind : char { plic_empty = 0, plic_full = 1, plic_mixed = 2, plic_uniform = 3 };

struct PlicCell {
    Vec2 m;
    double c = 0.0;
    char kind = plic_empty;
};

std::vector<PlicCell> build_plic(const ScalarField& alpha, const NormalField& nf,
                                 const Grid& g, int* uniform_fallbacks) {
    std::vector<PlicCell> p(g.n_cells());
    for (int c = 0; c < g.n_cells(); ++c) {
        const double a = std::clamp(alpha[c], 0.0, 1.0);
        if (a <= 1e-9) {
            p[c].kind = plic_empty;
        } else if (a >= 1.0 - 1e-9) {
            p[c].kind = plic_full;
        } else if (nf.usable[c]) {
            p[c].kind = plic_mixed;
            p[c].m = {-nf.n[c].x, -nf.n[c].y}; // out of the liquid
            p[c].c = plic_constant(p[c].m, a, g.dx, g.dy);
        } else {
            p[c].kind = plic_uniform;
            if (uniform_fallbacks) ++*uniform_fallbacks;
        }
    }
    return p;
}

// Liquid area of a sub-rectangle [a,b]x[0,dy] (x-slab) or [0,dx]x[a,b] (y-slab).
double slab_liquid_area(const PlicCell& p, double alpha, bool xslab, double a, double b,
                        double dx, double dy) {
    const double w = b - a;
    if (w <= 0.0) return 0.0;
    const double full = xslab ? w * dy : dx * w;
    switch (p.kind) {
        case plic_empty: return 0.0;
        case plic_full: return full;
        case plic_uniform: return std::clamp(alpha, 0.0, 1.0) * full;
        default: break;
    }
    if (xslab) return plic_area_fraction(p.m, p.c - p.m.x * a, w, dy) * full;
    return plic_area_fraction(p.m, p.c - p.m.y * a, dx, w) * full;
}

} // namespace

int round_wisps(ScalarField& alpha, const NormalField& nf, const Grid& g,
                double* volume_moved) {
    int count = 0;
    double moved = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) {
        if (!(alpha[c] > 0.0 && alpha[c] < 1.0) || nf.usable[c]) continue;
        const double target = alpha[c] >= 0.5 ? 1.0 : 0.0;
        const double excess = (alpha[c] - target) * g.cell_volume(c);
        alpha[c] = target;
        ++count;
        // most-mixed 4-neighbour takes the difference, deterministic W,E,S,N order
        const int i = g.ci(c), j = g.cj(c);
        int best = -1;
        double bestmix = 0.0;
        const int cand[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (auto& ij : cand) {
            int ii = ij[0], jj = ij[1];
            if (g.periodic_x()) ii = (ii + g.nx) % g.nx;
            if (g.periodic_y()) jj = (jj + g.ny) % g.ny;
            if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
            const int n = g.cell(ii, jj);
            const double mix = std::min(alpha[n], 1.0 - alpha[n]);
            if (nf.usable[n] && mix > bestmix) {
                bestmix = mix;
                best = n;
            }
        }
        if (best >= 0) {
            alpha[best] = std::clamp(alpha[best] + excess / g.cell_volume(best), 0.0, 1.0);
            moved += std::abs(excess);
        }
    }
    if (volume_moved) *volume_moved = moved;
    return count;
}

AdvectReport advect(ScalarField& alpha, const FaceField& phi, double dt, const Grid& g,
                    const NormalField& normals, bool x_first, double inflow_alpha) {
    AdvectReport rep;
    rep.wisps_rounded = round_wisps(alpha, normals, g, &rep.wisp_volume_moved);

    std::vector<char> cwy(g.n_cells());
    for (int c = 0; c < g.n_cells(); ++c) cwy[c] = alpha[c] > 0.5;

    auto sweep = [&](bool xdir) {
        int fallbacks = 0;
        const std::vector<PlicCell> plic = build_plic(alpha, normals, g, &fallbacks);
        std::vector<double> dliq(g.n_cells(), 0.0), dvol(g.n_cells(), 0.0);
        for (int k = 0; k < static_cast<int>(g.faces.size()); ++k) {
            const Face& face = g.faces[k];
            const bool is_x = face.normal.x != 0.0;
            if (is_x != xdir) continue;
            const double q = phi[k];
            if (q != 0.0) {
                const double swept = std::abs(q) * dt;
                const int donor = q >= 0.0 ? face.owner : face.neighbour;
                double F; // liquid volume, signed like q
                if (donor < 0) {
                    F = -inflow_alpha * swept; // inflow through a boundary face
                } else {
                    const double w = face.area > 0.0 ? swept / face.area : 0.0;
                    const double span = xdir ? g.dx : g.dy;
                    if (w > 0.5 * span * (1.0 + 1e-12))
                        throw std::runtime_error(
                            "advect: sweep Courant > 0.5 at face " + std::to_string(k) +
                            " (cell " + std::to_string(donor) + ")");
                    const double dir = donor == face.owner ? 1.0 : -1.0;
                    const Vec2 out = {face.normal.x * dir, face.normal.y * dir};
                    const bool high_side = xdir ? out.x > 0.0 : out.y > 0.0;
                    const double a = high_side ? span - w : 0.0;
                    const double b = high_side ? span : w;
                    const double area =
                        slab_liquid_area(plic[donor], alpha[donor], xdir, a, b, g.dx, g.dy);
                    const double slab_area = xdir ? w * g.dy : g.dx * w;
                    const double frac = slab_area > 0.0 ? area / slab_area : 0.0;
                    F = (q >= 0.0 ? 1.0 : -1.0) * frac * swept;
                }
                dliq[face.owner] -= F;
                if (face.neighbour >= 0) dliq[face.neighbour] += F;
            }
            dvol[face.owner] += q;
            if (face.neighbour >= 0) dvol[face.neighbour] -= q;
        }
        for (int c = 0; c < g.n_cells(); ++c) {
            const double V = g.cell_volume(c);
            alpha[c] += dliq[c] / V + (cwy[c] ? dvol[c] * dt / V : 0.0);
        }
        return fallbacks;
    };

    sweep(x_first);
    sweep(!x_first);

    // final bound enforcement; intermediate sweep values may legitimately overshoot
    double clipped = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) {
        const double over = std::max({alpha[c] - 1.0, -alpha[c], 0.0});
        rep.max_overshoot = std::max(rep.max_overshoot, over);
        if (alpha[c] < 0.0) {
            clipped -= -alpha[c] * g.cell_volume(c);
            alpha[c] = 0.0;
        } else if (alpha[c] > 1.0) {
            clipped += (alpha[c] - 1.0) * g.cell_volume(c);
            alpha[c] = 1.0;
        }
    }
    rep.clipped_volume = clipped;
    if (clipped != 0.0) {
        // return the net clipped liquid to mixed cells, deterministic order
        for (int c = 0; c < g.n_cells() && clipped != 0.0; ++c) {
            if (alpha[c] <= 0.01 || alpha[c] >= 0.99) continue;
            const double V = g.cell_volume(c);
            const double room = clipped > 0.0 ? (0.99 - alpha[c]) * V : (alpha[c] - 0.01) * V;
            const double take = clipped > 0.0 ? std::min(clipped, room) : std::max(clipped, -room);
            alpha[c] += take / V;
            clipped -= take;
            rep.redistributed += std::abs(take);
        }
    }
    return rep;
}

NormalField slope_fit_normals(const Grid& g, const ScalarField& alpha, NormalField seed) {
    for (int c = 0; c < g.n_cells(); ++c) {
        if (!seed.usable[c]) continue;
        const double ac = std::clamp(alpha[c], 0.0, 1.0);
        if (ac <= 1e-9 || ac >= 1.0 - 1e-9) continue;
        const int i = g.ci(c), j = g.cj(c);
        double A[3][3];
        bool ok = true;
        for (int di = -1; di <= 1 && ok; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                const int id = fold_cell(g, i + di, j + dj);
                if (id < 0) {
                    ok = false;
                    break;
                }
                A[di + 1][dj + 1] = std::clamp(alpha[id], 0.0, 1.0);
            }
        if (!ok) continue;

        Vec2 best{};
        double best_score = std::numeric_limits<double>::infinity();
        auto try_candidate = [&](Vec2 m) {
            const double len = std::hypot(m.x, m.y);
            m = {m.x / len, m.y / len};
            const double c0 = plic_constant(m, ac, g.dx, g.dy);
            double score = 0.0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const double cc = c0 - m.x * (di * g.dx) - m.y * (dj * g.dy);
                    const double d = plic_area_fraction(m, cc, g.dx, g.dy) - A[di + 1][dj + 1];
                    score += d * d;
                }
            if (score < best_score) {
                best_score = score;
                best = m;
            }
        };
        // vertical orientation: liquid thickness summed along y per column
        {
            const double sy = seed.n[c].y >= 0.0 ? -1.0 : 1.0; // m.y, out of the liquid
            double h[3];
            for (int k = 0; k < 3; ++k)
                h[k] = (A[k][0] + A[k][1] + A[k][2]) * g.dy;
            try_candidate({-(h[2] - h[0]) / (2.0 * g.dx), sy});
            try_candidate({-(h[1] - h[0]) / g.dx, sy});
            try_candidate({-(h[2] - h[1]) / g.dx, sy});
        }
        // horizontal orientation: thickness summed along x per row
        {
            const double sx = seed.n[c].x >= 0.0 ? -1.0 : 1.0;
            double h[3];
            for (int k = 0; k < 3; ++k)
                h[k] = (A[0][k] + A[1][k] + A[2][k]) * g.dx;
            try_candidate({sx, -(h[2] - h[0]) / (2.0 * g.dy)});
            try_candidate({sx, -(h[1] - h[0]) / g.dy});
            try_candidate({sx, -(h[2] - h[1]) / g.dy});
        }
        seed.n[c] = {-best.x, -best.y};
    }
    return seed;
}

} // namespace capflow
