#include "doctest.h"

#include <cmath>

#include "capflow/bench.hpp"

using namespace capflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("make_case pins the family geometries") {
    SUBCASE("static_prescribed") {
        CaseConfig c;
        c.kind = CaseKind::static_prescribed;
        c.resolution = 20;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 40);
        CHECK(s.grid.ny == 40);
        CHECK(s.grid.dx == doctest::Approx(5e-5));
        CHECK(s.flow.fluids.sigma == doctest::Approx(0.012));
        CHECK(s.flow.imposed_kappa == doctest::Approx(20000.0));
        CHECK(s.jump_exact == doctest::Approx(240.0));
        CHECK(s.t_end == doctest::Approx(0.01));
        CHECK(s.track_shape);
        CHECK(std::isnan(s.kappa_exact));
    }
    SUBCASE("static_laplace sets sigma from the Laplace number") {
        CaseConfig c;
        c.kind = CaseKind::static_laplace;
        c.resolution = 10;
        c.laplace = 1200.0;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 8); // 0.8 D domain
        CHECK(s.flow.fluids.sigma == doctest::Approx(0.012));
        CHECK(s.kappa_exact == doctest::Approx(2000.0));
        CHECK(std::isnan(s.flow.imposed_kappa));
        c.laplace = 12000.0;
        CHECK(make_case(c).flow.fluids.sigma == doctest::Approx(0.12));
    }
    SUBCASE("translating starts at the Weber-0.4 speed") {
        CaseConfig c;
        c.kind = CaseKind::translating;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.patches[side_left].kind == PatchKind::periodic);
        CHECK(s.v_drift.x == doctest::Approx(2.1909).epsilon(1e-3));
        CHECK(s.v0[0].x == doctest::Approx(s.v_drift.x));
        CHECK(s.t_end == doctest::Approx(1e-3 / 2.1909).epsilon(1e-3));
    }
    SUBCASE("oscillating pins the Lamb frequency") {
        CaseConfig c;
        c.kind = CaseKind::oscillating;
        c.resolution = 10;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 16);
        CHECK(s.omega_exact == doctest::Approx(1824.0).epsilon(5e-4));
        CHECK(s.flow.fluids.mu_l == 0.0);
        CHECK(s.flow.fluids.rho_l / s.flow.fluids.rho_g == doctest::Approx(100.0));
        // 3.6 oscillation periods
        CHECK(s.t_end == doctest::Approx(3.6 * 2.0 * kPi / s.omega_exact));
    }
    SUBCASE("rising_bubble") {
        CaseConfig c;
        c.kind = CaseKind::rising_bubble;
        c.resolution = 20;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 40);
        CHECK(s.grid.ny == 80);
        CHECK(s.diameter == doctest::Approx(0.5));
        CHECK(s.flow.fluids.gravity.y == doctest::Approx(-0.98));
        CHECK(s.grid.patches[side_bottom].kind == PatchKind::wall);
        CHECK(s.grid.patches[side_left].kind == PatchKind::symmetry);
        // gas inside the circle
        double amin = 2.0;
        for (int c2 = 0; c2 < s.grid.n_cells(); ++c2) amin = std::min(amin, s.alpha0[c2]);
        CHECK(amin == doctest::Approx(0.0));
        CHECK(s.alpha0[s.grid.cell(0, 0)] == doctest::Approx(1.0));
    }
    SUBCASE("sessile wall carries the static angle") {
        CaseConfig c;
        c.kind = CaseKind::sessile;
        c.resolution = 50;
        c.theta_deg = 112.0;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 150);
        CHECK(s.grid.ny == 75);
        CHECK(s.grid.patches[side_bottom].contact == ContactMode::static_angle);
        CHECK(s.grid.patches[side_bottom].contact_angle_deg == doctest::Approx(112.0));
        CHECK(s.theta_target == doctest::Approx(112.0));
        c.theta_deg = 181.0;
        CHECK_THROWS(make_case(c));
    }
    SUBCASE("suspended kinds") {
        CaseConfig c;
        c.kind = CaseKind::suspended_2d;
        const CaseSetup s = make_case(c);
        CHECK(s.grid.nx == 30);
        CHECK(s.grid.ny == 60);
        CHECK(s.grid.patches[side_left].contact == ContactMode::dynamic);
        CHECK(s.grid.patches[side_right].kind == PatchKind::open);
        CHECK(s.flow.fluids.sigma == doctest::Approx(0.01));
        CHECK(!s.grid.axisymmetric);

        c.kind = CaseKind::suspended_axisym;
        const CaseSetup sa = make_case(c);
        CHECK(sa.grid.axisymmetric);
        CHECK(sa.grid.origin.x == doctest::Approx(5e-5));
        CHECK(sa.flow.fluids.sigma == doctest::Approx(0.05));
        c.sigma = 0.07;
        CHECK(make_case(c).flow.fluids.sigma == doctest::Approx(0.07));
    }
}

TEST_CASE("suspension_theta matches the weight balance") {
    FluidPair fl;
    fl.rho_l = 1000.0;
    fl.rho_g = 1.0;
    fl.gravity = {0.0, -9.81};
    const double R = 5e-4;
    SUBCASE("planar") {
        fl.sigma = 0.01;
        CHECK(suspension_theta(fl, R, 1e-4, false) == doctest::Approx(67.33).epsilon(1e-3));
        fl.sigma = 0.005;
        CHECK(suspension_theta(fl, R, 1e-4, false) == doctest::Approx(39.63).epsilon(1e-3));
        fl.sigma = 0.07;
        CHECK(suspension_theta(fl, R, 1e-4, false) == doctest::Approx(86.84).epsilon(1e-3));
    }
    SUBCASE("axisymmetric") {
        fl.sigma = 0.05;
        CHECK(suspension_theta(fl, R, 1e-4, true) == doctest::Approx(70.91).epsilon(1e-3));
        fl.sigma = 0.04;
        CHECK(suspension_theta(fl, R, 1e-4, true) == doctest::Approx(65.87).epsilon(1e-3));
        fl.sigma = 0.07;
        CHECK(suspension_theta(fl, R, 1e-4, true) == doctest::Approx(76.49).epsilon(1e-3));
    }
    SUBCASE("too heavy to suspend") {
        fl.sigma = 0.001;
        CHECK_THROWS(suspension_theta(fl, R, 1e-4, false));
    }
}

TEST_CASE("sessile_analytics circular cap") {
    SUBCASE("90 degrees keeps the half-disc") {
        const SessileShape s = sessile_analytics(1.0, 90.0);
        CHECK(s.radius == doctest::Approx(1.0));
        CHECK(s.height == doctest::Approx(1.0));
        CHECK(s.spread == doctest::Approx(2.0));
    }
    SUBCASE("50 degrees") {
        const SessileShape s = sessile_analytics(1.0, 50.0);
        CHECK(s.radius == doctest::Approx(2.0326).epsilon(1e-3));
        CHECK(s.height == doctest::Approx(0.7261).epsilon(1e-3));
        CHECK(s.spread == doctest::Approx(3.1139).epsilon(1e-3));
    }
    SUBCASE("area is conserved for any angle") {
        for (double th : {35.0, 70.0, 112.0, 135.0}) {
            const SessileShape s = sessile_analytics(1.0, th);
            const double rad = th * kPi / 180.0;
            const double area =
                s.radius * s.radius * (rad - std::sin(rad) * std::cos(rad));
            CHECK(area == doctest::Approx(0.5 * kPi).epsilon(1e-9));
        }
    }
    CHECK_THROWS(sessile_analytics(1.0, 0.0));
}

TEST_CASE("oscillation_frequency recovers a cosine") {
    const double omega = 1824.0;
    const double t_end = 3.6 * 2.0 * kPi / omega;
    SUBCASE("clean signal") {
        std::vector<double> t, x;
        for (int i = 0; i <= 4000; ++i) {
            t.push_back(t_end * i / 4000.0);
            x.push_back(std::cos(omega * t.back()));
        }
        CHECK(oscillation_frequency(t, x) == doctest::Approx(omega).epsilon(1e-3));
    }
    SUBCASE("staircased signal") {
        std::vector<double> t, x;
        for (int i = 0; i <= 2500; ++i) {
            t.push_back(t_end * i / 2500.0);
            const double v = std::cos(omega * t.back());
            x.push_back(std::round(v * 40.0) / 40.0); // 2.5% quantization
        }
        CHECK(oscillation_frequency(t, x) == doctest::Approx(omega).epsilon(1e-2));
    }
    SUBCASE("too few periods throws") {
        std::vector<double> t, x;
        for (int i = 0; i <= 500; ++i) {
            t.push_back(2.0 * 2.0 * kPi / omega * i / 500.0);
            x.push_back(std::cos(omega * t.back()));
        }
        CHECK_THROWS(oscillation_frequency(t, x));
    }
}

TEST_CASE("field metrics on hand-built states") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    SUBCASE("speeds with drift") {
        VectorField v(g.n_cells(), {2.0, 0.0});
        v[5] = {2.0, 1.0};
        CHECK(max_speed(v) == doctest::Approx(std::sqrt(5.0)));
        CHECK(max_speed(v, {2.0, 0.0}) == doctest::Approx(1.0));
        CHECK(rms_speed(v, {2.0, 0.0}) ==
              doctest::Approx(std::sqrt(1.0 / g.n_cells())));
    }
    SUBCASE("shape_error") {
        ScalarField a(4, 0.0), b(4, 0.0);
        a[2] = 0.5;
        const ShapeError e = shape_error(a, b);
        CHECK(e.linf == doctest::Approx(0.5));
        CHECK(e.l2 == doctest::Approx(0.25));
        CHECK_THROWS(shape_error(a, ScalarField(3, 0.0)));
    }
    SUBCASE("pressure_jump needs both plateaus") {
        ScalarField a(g.n_cells(), 1.0);
        std::vector<double> p(g.n_cells(), 5.0);
        CHECK(std::isnan(pressure_jump(a, p)));
        for (int c = 0; c < 10; ++c) {
            a[c] = 0.0;
            p[c] = 2.0;
        }
        CHECK(pressure_jump(a, p) == doctest::Approx(3.0));
    }
    SUBCASE("bubble_metrics tracks the gas phase") {
        ScalarField a(g.n_cells(), 1.0);
        VectorField v(g.n_cells(), {});
        const int hole = g.cell(3, 5);
        a[hole] = 0.0;
        v[hole] = {0.0, 0.7};
        const BubbleMetrics m = bubble_metrics(g, a, v);
        CHECK(m.y_c == doctest::Approx(g.cell_center(hole).y));
        CHECK(m.v_c == doctest::Approx(0.7));
        CHECK(m.circularity > 0.0);
    }
    SUBCASE("interface_max_x interpolates the crossing") {
        ScalarField a(g.n_cells(), 0.0);
        for (int c = 0; c < g.n_cells(); ++c)
            if (g.cell_center(c).x < 0.4) a[c] = 1.0; // columns 0..2 wet
        // crossing between columns 2 and 3 at alpha 1 -> 0: lambda = 0.5
        CHECK(interface_max_x(g, a) == doctest::Approx(g.cell_center(g.cell(2, 0)).x +
                                                       0.5 * g.dx));
        CHECK(std::isnan(interface_max_x(g, ScalarField(g.n_cells(), 1.0))));
    }
    SUBCASE("liquid_volume weights cell volumes") {
        ScalarField a(g.n_cells(), 0.5);
        CHECK(liquid_volume(g, a) == doctest::Approx(0.5));
    }
}

TEST_CASE("dimensionless_numbers") {
    FluidPair fl{1000.0, 1.0, 0.02, 2e-5, 0.07, {0.0, -9.81}};
    const Dimensionless d = dimensionless_numbers(fl, 1e-3, 0.1, 2.0);
    CHECK(d.laplace == doctest::Approx(1000.0 * 0.07 * 1e-3 / (0.02 * 0.02)));
    CHECK(d.capillary == doctest::Approx(0.02 * 0.1 / 0.07));
    CHECK(d.weber == doctest::Approx(1000.0 * 4.0 * 1e-3 / 0.07));
    CHECK(d.eotvos == doctest::Approx(1000.0 * 9.81 * 1e-6 / 0.07));
    FluidPair dry;
    CHECK(std::isnan(dimensionless_numbers(dry, 1.0, 1.0, 1.0).laplace));
}

TEST_CASE("convergence_order") {
    CHECK(convergence_order(4.0, 1.0) == doctest::Approx(2.0));
    CHECK(convergence_order(1.0, 0.5) == doctest::Approx(1.0));
    CHECK(std::isnan(convergence_order(0.0, 1.0)));
}

TEST_CASE("measure_row gates metrics by case kind") {
    CaseConfig c;
    c.kind = CaseKind::static_laplace;
    c.resolution = 10;
    const CaseSetup setup = make_case(c);
    const StencilTable table = precompute_stencils(setup.grid);
    const FlowState s = init_state(setup.grid, setup.alpha0, setup.v0);
    const DiagRow r = measure_row(setup, table, s, 1e-6, std::nan(""));
    CHECK(r.t == 0.0);
    CHECK(r.dt == doctest::Approx(1e-6));
    CHECK(r.max_v == 0.0);
    CHECK(!std::isnan(r.linf_kappa));
    CHECK(!std::isnan(r.l2_shape));
    CHECK(!std::isnan(r.p_jump)); // zero field, but both plateaus exist
    CHECK(std::isnan(r.y_c));
    CHECK(std::isnan(r.x_extent));
    CHECK(std::isnan(r.theta_star));
}

TEST_CASE("run_case samples, snapshots, and conserves volume") {
    CaseConfig c;
    c.kind = CaseKind::static_prescribed;
    c.resolution = 6;
    c.t_end = 4e-4;
    c.sample_every = 2;
    const CaseSetup setup = make_case(c);

    int snaps = 0, last_idx = -1;
    const RunResult r = run_case(setup, 4, [&](const Grid&, const FlowState&, int idx) {
        ++snaps;
        CHECK(idx == last_idx + 1);
        last_idx = idx;
    });
    CHECK(snaps == 5); // t = 0 plus 4 through t_end
    REQUIRE(r.rows.size() >= 2);
    CHECK(r.rows.front().t == 0.0);
    CHECK(r.state.t == doctest::Approx(c.t_end).epsilon(1e-9));
    for (size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].t > r.rows[i - 1].t);
    CHECK(std::abs(r.liquid_volume_end - r.liquid_volume0) / r.liquid_volume0 < 1e-9);
    CHECK(std::isnan(r.theta_star_mean)); // no dynamic contact in this family
}
