#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "capflow/config.hpp"
#include "capflow/io.hpp"

namespace fs = std::filesystem;
using namespace capflow;

namespace {

struct Options {
    std::string config;
    std::string case_name;
    std::string out_dir;
    std::string sigma, theta, laplace, fiber_d, t_end; // strings so "unset" is distinguishable
    int resolution = 0;
    int sample_every = 0;
    int snapshots = 0;
    int threads = 0;
    std::vector<int> resolutions;
};

void add_case_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "flat key = value config file");
    cmd->add_option("--case", o.case_name, "case name (see `validate --help`)");
    cmd->add_option("--resolution", o.resolution, "cells per droplet diameter");
    cmd->add_option("--laplace", o.laplace, "Laplace number (static_laplace)");
    cmd->add_option("--sigma", o.sigma, "surface tension override (suspended kinds)");
    cmd->add_option("--theta", o.theta, "sessile wall angle [deg]");
    cmd->add_option("--fiber-d", o.fiber_d, "fiber diameter [m] (suspended_axisym)");
    cmd->add_option("--t-end", o.t_end, "stop time [s]");
    cmd->add_option("--sample-every", o.sample_every, "diagnostics cadence in steps");
    cmd->add_option("--out", o.out_dir, "output directory");
}

double to_double(const std::string& flag, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad number for " + flag + ": " + s);
    }
}

RunConfig resolve(const Options& o) {
    RunConfig rc;
    if (!o.config.empty()) rc = parse_config_file(o.config);
    if (!o.case_name.empty()) rc.case_cfg.kind = case_kind_from_name(o.case_name);
    if (o.resolution > 0) rc.case_cfg.resolution = o.resolution;
    if (!o.laplace.empty()) rc.case_cfg.laplace = to_double("--laplace", o.laplace);
    if (!o.sigma.empty()) rc.case_cfg.sigma = to_double("--sigma", o.sigma);
    if (!o.theta.empty()) rc.case_cfg.theta_deg = to_double("--theta", o.theta);
    if (!o.fiber_d.empty()) rc.case_cfg.fiber_d = to_double("--fiber-d", o.fiber_d);
    if (!o.t_end.empty()) rc.case_cfg.t_end = to_double("--t-end", o.t_end);
    if (o.sample_every > 0) rc.case_cfg.sample_every = o.sample_every;
    if (!o.out_dir.empty()) rc.out_dir = o.out_dir;
    if (o.snapshots > 0) rc.snapshots = o.snapshots;
    if (o.threads > 0) rc.threads = o.threads;
    if (!o.resolutions.empty()) rc.resolutions = o.resolutions;
    return rc;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string run_one(const RunConfig& rc) {
    const CaseSetup setup = make_case(rc.case_cfg);
    const std::string tag = std::string(case_kind_name(rc.case_cfg.kind)) + "_res" +
                            std::to_string(rc.case_cfg.resolution);
    const std::string dir = rc.out_dir + "/" + tag;
    fs::create_directories(dir);

    std::vector<std::string> files{"diag.csv", "manifest.json"};
    SnapshotSink sink;
    if (rc.snapshots > 0)
        sink = [&dir, &files](const Grid& g, const FlowState& s, int idx) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%03d.vtk", idx);
            write_vtk(dir + "/" + name, g, s);
            files.emplace_back(name);
        };

    const RunResult res = run_case(setup, rc.snapshots, sink);
    write_csv(dir + "/diag.csv", res.rows);
    write_manifest(dir + "/manifest.json", setup, res, files);

    const DiagRow& last = res.rows.back();
    std::ostringstream msg;
    msg << tag << ": " << res.state.step << " steps to t=" << fmt(res.state.t)
        << ", max|v|=" << fmt(last.max_v);
    if (!std::isnan(last.capillary)) msg << ", Ca=" << fmt(last.capillary);
    if (!std::isnan(last.linf_kappa)) msg << ", Linf_kappa=" << fmt(last.linf_kappa);
    if (!std::isnan(last.l2_shape)) msg << ", L2_shape=" << fmt(last.l2_shape);
    if (!std::isnan(last.p_jump)) msg << ", p_jump=" << fmt(last.p_jump);
    if (!std::isnan(res.theta_star_mean)) {
        msg << ", theta*=" << fmt(res.theta_star_mean);
        if (!std::isnan(setup.theta_target))
            msg << " (target " << fmt(setup.theta_target) << ")";
    }
    if (res.liquid_volume0 > 0.0)
        msg << ", vol drift="
            << fmt(std::abs(res.liquid_volume_end - res.liquid_volume0) /
                   res.liquid_volume0);
    msg << "\n  -> " << dir;
    return msg.str();
}

int cmd_run(const Options& o) {
    std::cout << run_one(resolve(o)) << "\n";
    return 0;
}

int cmd_sweep(const Options& o) {
    const RunConfig base = resolve(o);
    std::vector<int> res_list = base.resolutions;
    if (res_list.empty()) res_list = {10, 20, 40};

    std::vector<std::string> outcome(res_list.size());
    std::vector<std::string> errors(res_list.size());
    std::atomic<size_t> next{0};
    const int n_workers =
        std::max(1, std::min<int>(base.threads, static_cast<int>(res_list.size())));

    const auto worker = [&]() {
        for (size_t j = next.fetch_add(1); j < res_list.size(); j = next.fetch_add(1)) {
            RunConfig rc = base;
            rc.case_cfg.resolution = res_list[j];
            try {
                outcome[j] = run_one(rc);
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    int rcode = 0;
    for (size_t j = 0; j < res_list.size(); ++j) {
        if (!errors[j].empty()) {
            std::cerr << "res " << res_list[j] << " failed: " << errors[j] << "\n";
            rcode = 1;
        } else {
            std::cout << outcome[j] << "\n";
        }
    }
    return rcode;
}

int cmd_validate(const Options& o) {
    const RunConfig rc = resolve(o);
    const CaseSetup setup = make_case(rc.case_cfg);
    const Grid& g = setup.grid;
    const FluidPair& f = setup.flow.fluids;

    std::cout << "case " << case_kind_name(rc.case_cfg.kind) << " res "
              << rc.case_cfg.resolution << "\n"
              << "  grid " << g.nx << "x" << g.ny << " (" << g.n_cells()
              << " cells), dx=" << fmt(g.dx)
              << (g.axisymmetric ? ", axisymmetric" : "") << "\n"
              << "  fluids rho " << fmt(f.rho_l) << "/" << fmt(f.rho_g) << ", mu "
              << fmt(f.mu_l) << "/" << fmt(f.mu_g) << ", sigma " << fmt(f.sigma)
              << ", g=(" << fmt(f.gravity.x) << "," << fmt(f.gravity.y) << ")\n";

    static const char* side_names[] = {"left", "right", "bottom", "top"};
    std::cout << "  patches";
    for (int s = 0; s < 4; ++s) {
        const PatchSpec& p = g.patches[s];
        const char* kind = p.kind == PatchKind::wall      ? "wall"
                           : p.kind == PatchKind::open     ? "open"
                           : p.kind == PatchKind::periodic ? "periodic"
                                                           : "symmetry";
        std::cout << " " << side_names[s] << "=" << kind;
        if (p.contact == ContactMode::static_angle)
            std::cout << "(theta " << fmt(p.contact_angle_deg) << ")";
        if (p.contact == ContactMode::dynamic) std::cout << "(dynamic)";
    }
    std::cout << "\n";

    const FlowState s0 = init_state(g, setup.alpha0, setup.v0);
    const double dt0 = compute_dt(g, s0, setup.flow, setup.t_end);
    std::cout << "  t_end " << fmt(setup.t_end) << " s, dt0 " << fmt(dt0) << " s (~"
              << static_cast<long>(setup.t_end / dt0) << " steps)\n";

    const Dimensionless dn =
        dimensionless_numbers(f, setup.diameter, max_speed(setup.v0), max_speed(setup.v0));
    if (!std::isnan(dn.laplace)) std::cout << "  La " << fmt(dn.laplace) << "\n";
    if (!std::isnan(dn.weber) && dn.weber > 0.0) std::cout << "  We " << fmt(dn.weber) << "\n";
    if (!std::isnan(dn.eotvos) && dn.eotvos > 0.0) std::cout << "  Eo " << fmt(dn.eotvos) << "\n";
    if (!std::isnan(setup.kappa_exact))
        std::cout << "  reference kappa " << fmt(setup.kappa_exact) << " 1/m\n";
    if (!std::isnan(setup.jump_exact))
        std::cout << "  reference pressure jump " << fmt(setup.jump_exact) << " Pa\n";
    if (!std::isnan(setup.omega_exact))
        std::cout << "  reference omega " << fmt(setup.omega_exact) << " rad/s\n";
    if (!std::isnan(setup.theta_target))
        std::cout << "  target contact angle " << fmt(setup.theta_target) << " deg\n";
    return 0;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& column,
             const std::string& out, const std::string& title, bool logy) {
    (void)diag_column(DiagRow{}, column); // reject unknown names up front
    std::vector<PlotSeries> series;
    for (const std::string& path : csvs) {
        const std::vector<DiagRow> rows = read_csv(path);
        if (rows.empty()) throw std::runtime_error("plot: no rows in " + path);
        const fs::path p(path);
        std::string label = p.stem().string() == "diag"
                                ? p.parent_path().filename().string()
                                : p.stem().string();
        if (label.empty()) label = path;
        PlotSeries sr{label, {}, {}};
        for (const DiagRow& r : rows) {
            sr.x.push_back(r.t);
            sr.y.push_back(diag_column(r, column));
        }
        series.push_back(std::move(sr));
    }
    write_svg_plot(out, title.empty() ? column : title, "t [s]", column, series, logy);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-phase incompressible flow benchmarks with sharp surface"
                 " tension jumps"};
    app.require_subcommand(1);

    Options run_o, sweep_o, val_o;

    CLI::App* run = app.add_subcommand("run", "run one case and write diagnostics");
    add_case_options(run, run_o);
    run->add_option("--snapshots", run_o.snapshots, "evenly spaced field snapshots");

    CLI::App* sweep =
        app.add_subcommand("sweep", "run one case across several resolutions");
    add_case_options(sweep, sweep_o);
    sweep->add_option("--resolutions", sweep_o.resolutions, "resolution list")
        ->delimiter(',');
    sweep->add_option("--threads", sweep_o.threads, "concurrent jobs");

    CLI::App* val =
        app.add_subcommand("validate", "resolve a case and print it without running");
    add_case_options(val, val_o);

    std::vector<std::string> plot_csvs;
    std::string plot_col = "max_v", plot_out = "plot.svg", plot_title;
    bool plot_logy = false;
    CLI::App* plot = app.add_subcommand("plot", "render diagnostic CSVs to SVG");
    plot->add_option("csv", plot_csvs, "diagnostic CSV files")->required();
    plot->add_option("--column", plot_col, "column to plot");
    plot->add_option("--out", plot_out, "output SVG path");
    plot->add_option("--title", plot_title, "plot title");
    plot->add_flag("--logy", plot_logy, "log scale on y");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_o);
        if (sweep->parsed()) return cmd_sweep(sweep_o);
        if (val->parsed()) return cmd_validate(val_o);
        if (plot->parsed())
            return cmd_plot(plot_csvs, plot_col, plot_out, plot_title, plot_logy);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
