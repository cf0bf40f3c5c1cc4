#include "capflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "capflow/gfm.hpp"
#include "capflow/vof.hpp"

namespace capflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

PatchSpec slip(const char* name) { return {name, PatchKind::symmetry}; }
PatchSpec open_patch(const char* name) { return {name, PatchKind::open}; }

} // namespace

CaseSetup make_case(const CaseConfig& cfg) {
    if (cfg.resolution < 5)
        throw std::invalid_argument("make_case: resolution below 5 cells per diameter");

    const CaseKind kind = cfg.kind;
    const double D = kind == CaseKind::rising_bubble ? 0.5 : 1e-3;
    const double R = 0.5 * D;
    const double dx = D / cfg.resolution;
    const auto cells = [dx](double extent) {
        return static_cast<int>(std::lround(extent / dx));
    };

    std::array<PatchSpec, 4> patches{slip("left"), slip("right"), slip("bottom"),
                                     slip("top")};
    Vec2 origin{};
    bool axisym = false;
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    Vec2 center{};
    Vec2 v0_uniform{};
    Vec2 v_drift{};
    double t_end = cfg.t_end;
    double kappa_exact = kNaN, jump_exact = kNaN, omega_exact = kNaN,
           theta_target = kNaN;
    bool track_shape = false;

    FluidPair fl;
    FlowConfig flow;
    std::function<ScalarField(const Grid&)> initf;

    switch (kind) {
    case CaseKind::static_prescribed: {
        lx = ly = 2.0 * D;
        nx = ny = cells(lx);
        center = {D, D};
        fl.rho_l = fl.rho_g = 1.0;
        fl.mu_l = fl.mu_g = 1e-4;
        fl.sigma = 0.012;
        fl.gravity = {};
        flow.imposed_kappa = 240.0 / fl.sigma;
        jump_exact = 240.0;
        track_shape = true;
        if (t_end <= 0.0) t_end = 0.01;
        initf = [center, R](const Grid& g) { return init_circle_exact(g, center, R); };
        break;
    }
    case CaseKind::static_laplace: {
        lx = ly = 1.6 * R;
        nx = ny = cells(lx);
        center = {};
        fl.rho_l = fl.rho_g = 1.0;
        fl.mu_l = fl.mu_g = 1e-4;
        fl.sigma = cfg.laplace * fl.mu_l * fl.mu_l / (fl.rho_l * D);
        fl.gravity = {};
        kappa_exact = 1.0 / R;
        jump_exact = fl.sigma / R;
        track_shape = true;
        if (t_end <= 0.0) t_end = 0.01;
        initf = [R](const Grid& g) { return init_circle_exact(g, Vec2{}, R); };
        break;
    }
    case CaseKind::translating: {
        lx = ly = 2.0 * D;
        nx = ny = cells(lx);
        center = {D, D};
        patches[side_left] = {"left", PatchKind::periodic};
        patches[side_right] = {"right", PatchKind::periodic};
        fl.rho_l = fl.rho_g = 1.0;
        fl.mu_l = fl.mu_g = 1e-4;
        fl.sigma = 0.012;
        fl.gravity = {};
        const double v0 = std::sqrt(0.4 * fl.sigma / (fl.rho_l * D)); // We = 0.4
        v0_uniform = {v0, 0.0};
        v_drift = v0_uniform;
        if (t_end <= 0.0) t_end = D / v0; // one diameter of travel
        initf = [center, R](const Grid& g) { return init_circle_exact(g, center, R); };
        break;
    }
    case CaseKind::oscillating: {
        lx = ly = 1.6 * D;
        nx = ny = cells(lx);
        center = {0.8 * D, 0.8 * D};
        fl.rho_l = 1000.0;
        fl.rho_g = 10.0;
        fl.mu_l = fl.mu_g = 0.0;
        fl.sigma = 0.07;
        fl.gravity = {};
        omega_exact = std::sqrt(6.0 * fl.sigma / ((fl.rho_l + fl.rho_g) * R * R * R));
        if (t_end <= 0.0) t_end = 3.6 * 2.0 * kPi / omega_exact;
        initf = [center, R](const Grid& g) {
            return init_radial_shape(g, center, [R](double th) {
                return R * (1.0 + 0.04 * std::cos(2.0 * th));
            });
        };
        break;
    }
    case CaseKind::rising_bubble: {
        lx = 1.0;
        ly = 2.0;
        nx = cells(lx);
        ny = cells(ly);
        center = {0.5, 0.5};
        patches[side_bottom] = {"bottom", PatchKind::wall};
        patches[side_top] = {"top", PatchKind::wall};
        fl.rho_l = 1000.0;
        fl.rho_g = 100.0;
        fl.mu_l = 10.0;
        fl.mu_g = 1.0;
        fl.sigma = 24.5;
        fl.gravity = {0.0, -0.98};
        if (t_end <= 0.0) t_end = 3.0;
        initf = [center, R](const Grid& g) {
            ScalarField a = init_circle_exact(g, center, R);
            for (double& v : a.data) v = 1.0 - v;
            return a;
        };
        break;
    }
    case CaseKind::sessile: {
        if (!(cfg.theta_deg > 0.0 && cfg.theta_deg < 180.0))
            throw std::invalid_argument("make_case: wall angle outside (0, 180)");
        lx = 3e-3;
        ly = 1.5e-3;
        nx = cells(lx);
        ny = cells(ly);
        center = {0.5 * lx, 0.0};
        patches[side_bottom] = {"bottom", PatchKind::wall, ContactMode::static_angle,
                                cfg.theta_deg};
        fl.rho_l = 1000.0;
        fl.rho_g = 1.0;
        fl.mu_l = 0.08;
        fl.mu_g = 8e-6;
        fl.sigma = 0.07;
        fl.gravity = {};
        theta_target = cfg.theta_deg;
        if (t_end <= 0.0) t_end = 0.04;
        initf = [center, R](const Grid& g) { return init_circle_exact(g, center, R); };
        break;
    }
    case CaseKind::suspended_2d:
    case CaseKind::suspended_axisym: {
        axisym = kind == CaseKind::suspended_axisym;
        lx = 1.5e-3;
        ly = 3e-3;
        nx = cells(lx);
        ny = cells(ly);
        origin = axisym ? Vec2{0.5 * cfg.fiber_d, 0.0} : Vec2{};
        center = {0.0, 0.5 * ly};
        patches[side_left] = {"fiber", PatchKind::wall, ContactMode::dynamic};
        patches[side_right] = open_patch("right");
        patches[side_bottom] = open_patch("bottom");
        patches[side_top] = open_patch("top");
        fl.rho_l = 1000.0;
        fl.rho_g = 1.0;
        fl.mu_l = 0.02;
        fl.mu_g = 2e-5;
        fl.sigma = cfg.sigma > 0.0 ? cfg.sigma : (axisym ? 0.05 : 0.01);
        fl.gravity = {0.0, -9.81};
        theta_target = suspension_theta(fl, R, cfg.fiber_d, axisym);
        if (t_end <= 0.0) t_end = 0.05;
        initf = [center, R](const Grid& g) { return init_circle_exact(g, center, R); };
        break;
    }
    }

    flow.fluids = fl;
    Grid grid = build_grid(nx, ny, lx, ly, origin, axisym, patches);
    ScalarField a0 = initf(grid);
    VectorField v0(grid.n_cells(), v0_uniform);

    return CaseSetup{cfg,
                     std::move(grid),
                     flow,
                     std::move(a0),
                     std::move(v0),
                     t_end,
                     D,
                     center,
                     v_drift,
                     kappa_exact,
                     jump_exact,
                     omega_exact,
                     theta_target,
                     fl.sigma > 0.0 ? std::sqrt(fl.sigma / (fl.rho_l * D)) : kNaN,
                     track_shape};
}

Dimensionless dimensionless_numbers(const FluidPair& fluids, double diameter,
                                    double max_speed, double ref_speed) {
    Dimensionless d;
    if (fluids.sigma > 0.0) {
        if (fluids.mu_l > 0.0) {
            d.laplace = fluids.rho_l * fluids.sigma * diameter /
                        (fluids.mu_l * fluids.mu_l);
            d.capillary = fluids.mu_l * max_speed / fluids.sigma;
        }
        d.weber = fluids.rho_l * ref_speed * ref_speed * diameter / fluids.sigma;
        const double gmag = std::hypot(fluids.gravity.x, fluids.gravity.y);
        d.eotvos = fluids.rho_l * gmag * diameter * diameter / fluids.sigma;
    }
    return d;
}

double max_speed(const VectorField& v, Vec2 drift) {
    double m = 0.0;
    for (const Vec2& u : v.data) {
        const double ux = u.x - drift.x, uy = u.y - drift.y;
        m = std::max(m, ux * ux + uy * uy);
    }
    return std::sqrt(m);
}

double rms_speed(const VectorField& v, Vec2 drift) {
    if (v.data.empty()) return 0.0;
    double s = 0.0;
    for (const Vec2& u : v.data) {
        const double ux = u.x - drift.x, uy = u.y - drift.y;
        s += ux * ux + uy * uy;
    }
    return std::sqrt(s / static_cast<double>(v.data.size()));
}

double liquid_volume(const Grid& g, const ScalarField& alpha) {
    double vol = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) vol += alpha[c] * g.cell_volume(c);
    return vol;
}

double curvature_error_linf(const Grid& g, const ScalarField& alpha,
                            const StencilTable& table, double kappa_exact,
                            int smooth_iters) {
    const NormalField nrm = refine_normals(
        g, table, alpha, interface_normal(smooth_alpha(alpha, g, smooth_iters), g));
    const CurvatureField kap = build_curvature(g, alpha, nrm, table);
    double err = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) {
        if (alpha[c] <= 1e-6 || alpha[c] >= 1.0 - 1e-6) continue;
        if (!kap.usable[c]) continue;
        err = std::max(err, std::abs(kap.kappa[c] - kappa_exact));
    }
    return err / std::abs(kappa_exact);
}

ShapeError shape_error(const ScalarField& alpha, const ScalarField& ref) {
    if (alpha.data.size() != ref.data.size())
        throw std::invalid_argument("shape_error: field sizes differ");
    ShapeError e;
    double s2 = 0.0;
    for (size_t c = 0; c < alpha.data.size(); ++c) {
        const double d = alpha.data[c] - ref.data[c];
        s2 += d * d;
        e.linf = std::max(e.linf, std::abs(d));
    }
    e.l2 = std::sqrt(s2 / static_cast<double>(alpha.data.size()));
    return e;
}

double pressure_jump(const ScalarField& alpha, const std::vector<double>& p) {
    double in = 0.0, out = 0.0;
    int n_in = 0, n_out = 0;
    for (size_t c = 0; c < alpha.data.size(); ++c) {
        if (alpha.data[c] > 0.9) {
            in += p[c];
            ++n_in;
        } else if (alpha.data[c] < 0.1) {
            out += p[c];
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0) return kNaN;
    return in / n_in - out / n_out;
}

BubbleMetrics bubble_metrics(const Grid& g, const ScalarField& alpha,
                             const VectorField& v) {
    double w = 0.0, wy = 0.0, wv = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) {
        const double gas = (1.0 - alpha[c]) * g.cell_volume(c);
        w += gas;
        wy += gas * g.cell_center(c).y;
        wv += gas * v[c].y;
    }
    BubbleMetrics m;
    if (w <= 0.0) return m;
    m.y_c = wy / w;
    m.v_c = wv / w;
    const VectorField grad = gradient(alpha, g);
    double perimeter = 0.0;
    for (int c = 0; c < g.n_cells(); ++c)
        perimeter += std::hypot(grad[c].x, grad[c].y) * g.cell_volume(c);
    const double d_eq = std::sqrt(4.0 * w / kPi);
    if (perimeter > 0.0) m.circularity = kPi * d_eq / perimeter;
    return m;
}

double interface_max_x(const Grid& g, const ScalarField& alpha) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const Face& face : g.faces) {
        if (face.neighbour < 0) continue;
        const double ao = alpha[face.owner], an = alpha[face.neighbour];
        if ((ao - 0.5) * (an - 0.5) >= 0.0) continue;
        const double lam = relative_position(ao, an);
        mx = std::max(mx, g.cell_center(face.owner).x + lam * face.d.x);
    }
    return std::isfinite(mx) ? mx : kNaN;
}

double oscillation_frequency(const std::vector<double>& t,
                             const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (t.size() != x.size() || n < 16)
        throw std::invalid_argument("oscillation_frequency: series too short");

    // light phase-neutral smoothing so grid-scale staircase extrema do not
    // register as peaks
    std::vector<double> y(x), z(x.size());
    for (int pass = 0; pass < 2; ++pass) {
        z = y;
        for (int i = 1; i + 1 < n; ++i)
            z[i] = 0.25 * y[i - 1] + 0.5 * y[i] + 0.25 * y[i + 1];
        y.swap(z);
    }

    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw std::runtime_error("oscillation_frequency: flat signal");
    const double thresh = lo + 0.35 * (hi - lo);
    const int w = std::max(2, n / 40);

    std::vector<int> peaks;
    for (int i = 0; i < n; ++i) {
        if (y[i] < thresh) continue;
        bool top = true;
        for (int k = std::max(0, i - w); k <= std::min(n - 1, i + w) && top; ++k)
            top = y[k] <= y[i];
        if (!top) continue;
        if (!peaks.empty() && i - peaks.back() <= w) continue;
        peaks.push_back(i);
    }
    if (peaks.size() < 4)
        throw std::runtime_error(
            "oscillation_frequency: fewer than three full periods detected");

    // quadratic vertex through the three samples around a peak; non-uniform
    // spacing safe, offset clamped to the bracket
    const auto refine = [&](int i) {
        if (i <= 0 || i + 1 >= n) return t[i];
        const double dl = t[i] - t[i - 1], dr = t[i + 1] - t[i];
        const double yl = y[i - 1] - y[i], yr = y[i + 1] - y[i];
        const double den = 2.0 * (yl * dr + yr * dl);
        if (den >= 0.0) return t[i];
        const double off = (yl * dr * dr - yr * dl * dl) / den;
        return t[i] + std::clamp(off, -dl, dr);
    };

    const double span = refine(peaks[3]) - refine(peaks[0]);
    if (!(span > 0.0))
        throw std::runtime_error("oscillation_frequency: degenerate peak spacing");
    return 3.0 * 2.0 * kPi / span;
}

SessileShape sessile_analytics(double r0, double theta_deg) {
    if (!(theta_deg > 0.0 && theta_deg < 180.0))
        throw std::invalid_argument("sessile_analytics: angle outside (0, 180)");
    const double th = theta_deg * kPi / 180.0;
    SessileShape s;
    s.radius = r0 * std::sqrt(0.5 * kPi / (th - std::sin(th) * std::cos(th)));
    s.height = s.radius * (1.0 - std::cos(th));
    s.spread = 2.0 * s.radius * std::sin(th);
    return s;
}

double droplet_height(const Grid& g, const ScalarField& alpha) {
    double h = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        double col = 0.0;
        for (int j = 0; j < g.ny; ++j) col += alpha[g.cell(i, j)] * g.dy;
        h = std::max(h, col);
    }
    return h;
}

double wetted_length(const Grid& g, const ScalarField& alpha) {
    double l = 0.0;
    for (int i = 0; i < g.nx; ++i) l += alpha[g.cell(i, 0)] * g.dx;
    return l;
}

double suspension_theta(const FluidPair& fluids, double radius, double fiber_d,
                        bool axisym) {
    if (!(fluids.sigma > 0.0))
        throw std::invalid_argument("suspension_theta: sigma must be positive");
    const double gmag = std::hypot(fluids.gravity.x, fluids.gravity.y);
    double c;
    if (axisym) {
        if (!(fiber_d > 0.0))
            throw std::invalid_argument("suspension_theta: fiber diameter must be positive");
        c = 4.0 * fluids.rho_l * gmag * radius * radius * radius /
            (3.0 * fluids.sigma * fiber_d);
    } else {
        c = fluids.rho_l * gmag * kPi * radius * radius / (2.0 * fluids.sigma);
    }
    if (c >= 1.0)
        throw std::runtime_error("suspension_theta: droplet too heavy to suspend"
                                 " (cos theta = " + std::to_string(c) + ")");
    return std::acos(c) * 180.0 / kPi;
}

double convergence_order(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return kNaN;
    return std::log2(e_coarse / e_fine);
}

DiagRow measure_row(const CaseSetup& setup, const StencilTable& table,
                    const FlowState& s, double dt, double theta_star) {
    const Grid& g = setup.grid;
    const FluidPair& fl = setup.flow.fluids;
    DiagRow r;
    r.t = s.t;
    r.dt = dt;
    r.max_v = max_speed(s.v, setup.v_drift);
    if (fl.mu_l > 0.0 && fl.sigma > 0.0) r.capillary = fl.mu_l * r.max_v / fl.sigma;
    if (setup.v_sigma > 0.0)
        r.rms_v_nd = rms_speed(s.v, setup.v_drift) / setup.v_sigma;
    if (!std::isnan(setup.kappa_exact))
        r.linf_kappa = curvature_error_linf(g, s.alpha, table, setup.kappa_exact,
                                            setup.flow.alpha_smooth_iters);
    if (setup.track_shape) {
        const ShapeError se = shape_error(s.alpha, setup.alpha0);
        r.l2_shape = se.l2;
        r.linf_shape = se.linf;
    }
    if (fl.gravity.x == 0.0 && fl.gravity.y == 0.0)
        r.p_jump = pressure_jump(s.alpha, s.p_d);
    if (setup.config.kind == CaseKind::rising_bubble) {
        const BubbleMetrics bm = bubble_metrics(g, s.alpha, s.v);
        r.y_c = bm.y_c;
        r.v_c = bm.v_c;
        r.circularity = bm.circularity;
    }
    if (setup.config.kind == CaseKind::oscillating)
        r.x_extent = interface_max_x(g, s.alpha) - setup.center.x;
    r.theta_star = theta_star;
    return r;
}

double contact_theta(const StepReport& rep) {
    double best_y = -std::numeric_limits<double>::infinity();
    double th = kNaN;
    for (const DynamicContactFace& f : rep.contact_faces) {
        if (std::isnan(f.theta_frame)) continue;
        if (f.x_f.y > best_y) {
            best_y = f.x_f.y;
            th = 90.0 - f.theta_frame * 180.0 / kPi;
        }
    }
    return th;
}

RunResult run_case(const CaseSetup& setup, int n_snapshots,
                   const SnapshotSink& sink) {
    const Grid& g = setup.grid;
    if (!(setup.t_end > 0.0)) throw std::invalid_argument("run_case: t_end <= 0");

    const StencilTable table = precompute_stencils(g);
    FlowState s = init_state(g, setup.alpha0, setup.v0);
    const double vol0 = liquid_volume(g, s.alpha);

    std::vector<DiagRow> rows;
    rows.push_back(measure_row(setup, table, s, kNaN, kNaN));
    int snap = 0;
    if (n_snapshots > 0 && sink) sink(g, s, snap++);

    const double t_end = setup.t_end;
    const double t_stop = t_end * (1.0 - 1e-12);
    const int every = std::max(1, setup.config.sample_every);
    std::vector<std::pair<double, double>> theta_hist;
    long iter = 0;

    while (s.t < t_stop) {
        const double dt = compute_dt(g, s, setup.flow, t_end - s.t);
        const StepReport rep = advance(g, table, s, setup.flow, dt);
        ++iter;

        const double th = contact_theta(rep);
        if (!std::isnan(th)) theta_hist.emplace_back(s.t, th);

        if (iter % every == 0 || s.t >= t_stop)
            rows.push_back(measure_row(setup, table, s, dt, th));
        if (n_snapshots > 0 && sink)
            while (snap <= n_snapshots &&
                   s.t >= t_end * (static_cast<double>(snap) / n_snapshots) *
                              (1.0 - 1e-12))
                sink(g, s, snap++);
        if (iter > 5000000)
            throw std::runtime_error("run_case: step budget exhausted");
    }

    RunResult out{std::move(rows), std::move(s), vol0, 0.0};
    out.liquid_volume_end = liquid_volume(g, out.state.alpha);
    if (!theta_hist.empty()) {
        double sum = 0.0;
        int cnt = 0;
        for (const auto& [tt, tv] : theta_hist)
            if (tt >= 0.9 * t_end) {
                sum += tv;
                ++cnt;
            }
        if (cnt > 0) out.theta_star_mean = sum / cnt;
    }
    return out;
}

} // namespace capflow
