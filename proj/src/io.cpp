#include "capflow/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "capflow/config.hpp"
#include "json.hpp"

namespace capflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<std::pair<const char*, double DiagRow::*>, 14> kColumns{{
    {"t", &DiagRow::t},
    {"dt", &DiagRow::dt},
    {"max_v", &DiagRow::max_v},
    {"Ca", &DiagRow::capillary},
    {"rms_v_nd", &DiagRow::rms_v_nd},
    {"Linf_kappa", &DiagRow::linf_kappa},
    {"L2_shape", &DiagRow::l2_shape},
    {"Linf_shape", &DiagRow::linf_shape},
    {"p_jump", &DiagRow::p_jump},
    {"y_c", &DiagRow::y_c},
    {"v_c", &DiagRow::v_c},
    {"circularity", &DiagRow::circularity},
    {"x_extent", &DiagRow::x_extent},
    {"theta_star", &DiagRow::theta_star},
}};

// shortest representation that round-trips
std::string num(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("csv: to_chars failed");
    return {buf, p};
}

double parse_field(const std::string& s, const std::string& path, int lineno) {
    if (s.empty()) return kNaN;
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad number '" + s + "'");
    return v;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Ticks {
    std::vector<double> pos; // plot coordinate (log10 when the axis is log)
    std::vector<std::string> label;
};

Ticks linear_ticks(double lo, double hi) {
    Ticks t;
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    for (double v = std::ceil(lo / step) * step; v <= hi + 0.25 * step; v += step) {
        const double vv = std::abs(v) < 1e-3 * step ? 0.0 : v;
        t.pos.push_back(vv);
        t.label.push_back(tick_label(vv));
    }
    return t;
}

Ticks log_ticks(double lo10, double hi10) {
    Ticks t;
    const int a = static_cast<int>(std::floor(lo10));
    const int b = static_cast<int>(std::ceil(hi10));
    const int stride = std::max(1, (b - a) / 8);
    for (int e = a; e <= b; e += stride) {
        if (e < lo10 - 1e-9 || e > hi10 + 1e-9) continue;
        t.pos.push_back(e);
        char buf[24];
        std::snprintf(buf, sizeof buf, "1e%d", e);
        t.label.push_back(buf);
    }
    return t;
}

} // namespace

std::string csv_header() {
    std::string h;
    for (const auto& [name, ptr] : kColumns) {
        if (!h.empty()) h += ',';
        h += name;
    }
    return h;
}

std::string csv_line(const DiagRow& row) {
    std::string line;
    for (const auto& [name, ptr] : kColumns) {
        if (!line.empty()) line += ',';
        const double v = row.*ptr;
        if (!std::isnan(v)) line += num(v);
    }
    return line;
}

void write_csv(const std::string& path, const std::vector<DiagRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot open " + path);
    out << csv_header() << '\n';
    for (const DiagRow& r : rows) out << csv_line(r) << '\n';
    if (!out) throw std::runtime_error("csv: write failed for " + path);
}

std::vector<DiagRow> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header())
        throw std::runtime_error("csv: unrecognized header in " + path);

    std::vector<DiagRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        DiagRow r;
        size_t start = 0, col = 0;
        while (col < kColumns.size()) {
            const size_t comma = line.find(',', start);
            const bool last = comma == std::string::npos;
            const std::string field =
                line.substr(start, last ? std::string::npos : comma - start);
            r.*(kColumns[col].second) = parse_field(field, path, lineno);
            ++col;
            if (last) break;
            start = comma + 1;
        }
        if (col != kColumns.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(kColumns.size()) +
                                     " fields");
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::string> diag_column_names() {
    std::vector<std::string> names;
    names.reserve(kColumns.size());
    for (const auto& [name, ptr] : kColumns) names.emplace_back(name);
    return names;
}

double diag_column(const DiagRow& row, const std::string& name) {
    for (const auto& [n, ptr] : kColumns)
        if (name == n) return row.*ptr;
    throw std::runtime_error("diag_column: unknown column '" + name + "'");
}

void write_vtk(const std::string& path, const Grid& g, const FlowState& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("vtk: cannot open " + path);
    const int n = g.n_cells();
    out << "# vtk DataFile Version 3.0\n"
        << "capflow snapshot t=" << num(s.t) << "\n"
        << "ASCII\n"
        << "DATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.nx + 1 << ' ' << g.ny + 1 << " 1\n"
        << "ORIGIN " << num(g.origin.x) << ' ' << num(g.origin.y) << " 0\n"
        << "SPACING " << num(g.dx) << ' ' << num(g.dy) << " 1\n"
        << "CELL_DATA " << n << "\n";

    out << "SCALARS alpha double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < n; ++c) out << num(s.alpha[c]) << '\n';
    out << "SCALARS p_d double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < n; ++c) out << num(s.p_d[c]) << '\n';
    out << "VECTORS velocity double\n";
    for (int c = 0; c < n; ++c)
        out << num(s.v[c].x) << ' ' << num(s.v[c].y) << " 0\n";
    if (!out) throw std::runtime_error("vtk: write failed for " + path);
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool log_y) {
    constexpr int W = 960, H = 600, ml = 80, mr = 24, mt = 48, mb = 64;
    constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                       "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr int n_colors = 6;

    const auto usable = [log_y](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0);
    };

    double xlo = kNaN, xhi = kNaN, ylo = kNaN, yhi = kNaN;
    for (const PlotSeries& sr : series) {
        if (sr.x.size() != sr.y.size())
            throw std::runtime_error("svg: series '" + sr.label + "' x/y size mismatch");
        for (size_t i = 0; i < sr.x.size(); ++i) {
            if (!usable(sr.x[i], sr.y[i])) continue;
            const double yv = log_y ? std::log10(sr.y[i]) : sr.y[i];
            xlo = std::isnan(xlo) ? sr.x[i] : std::min(xlo, sr.x[i]);
            xhi = std::isnan(xhi) ? sr.x[i] : std::max(xhi, sr.x[i]);
            ylo = std::isnan(ylo) ? yv : std::min(ylo, yv);
            yhi = std::isnan(yhi) ? yv : std::max(yhi, yv);
        }
    }
    if (std::isnan(xlo)) throw std::runtime_error("svg: no plottable samples");
    if (xhi - xlo <= 0.0) {
        const double pad = std::abs(xlo) * 0.1 + 1e-12;
        xlo -= pad;
        xhi += pad;
    }
    if (yhi - ylo <= 0.0) {
        const double pad = std::abs(ylo) * 0.1 + (log_y ? 0.5 : 1e-12);
        ylo -= pad;
        yhi += pad;
    }

    const auto px = [&](double x) {
        return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr);
    };
    const auto py = [&](double yv) {
        return H - mb - (yv - ylo) / (yhi - ylo) * (H - mt - mb);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\""
        << " font-family=\"sans-serif\" font-size=\"18\">" << xml_escape(title)
        << "</text>\n";

    const Ticks xt = linear_ticks(xlo, xhi);
    const Ticks yt = log_y ? log_ticks(ylo, yhi) : linear_ticks(ylo, yhi);
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (size_t i = 0; i < xt.pos.size(); ++i) {
        const double x = px(xt.pos[i]);
        out << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x
            << "\" y2=\"" << H - mb << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\">" << xt.label[i] << "</text>\n";
    }
    for (size_t i = 0; i < yt.pos.size(); ++i) {
        const double y = py(yt.pos[i]);
        out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr
            << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\">" << yt.label[i] << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 16
        << "\" text-anchor=\"middle\">" << xml_escape(xlabel) << "</text>\n"
        << "<text x=\"20\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << (mt + H - mb) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n"
        << "</g>\n"
        << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
        << "\" height=\"" << H - mt - mb
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& sr = series[si];
        const char* color = palette[si % n_colors];
        std::vector<std::pair<double, double>> seg;
        const auto flush = [&]() {
            if (seg.size() >= 2) {
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"";
                for (const auto& [x, y] : seg) out << x << ',' << y << ' ';
                out << "\"/>\n";
            } else if (seg.size() == 1) {
                out << "<circle cx=\"" << seg[0].first << "\" cy=\"" << seg[0].second
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            }
            seg.clear();
        };
        for (size_t i = 0; i < sr.x.size(); ++i) {
            if (!usable(sr.x[i], sr.y[i])) {
                flush();
                continue;
            }
            const double yv = log_y ? std::log10(sr.y[i]) : sr.y[i];
            seg.emplace_back(px(sr.x[i]), py(yv));
        }
        flush();
        const int ly = mt + 18 + 18 * static_cast<int>(si);
        out << "<line x1=\"" << W - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
            << W - mr - 122 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << W - mr - 114 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(sr.label) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("svg: write failed for " + path);
}

void write_manifest(const std::string& path, const CaseSetup& setup,
                    const RunResult& result, const std::vector<std::string>& files) {
    const CaseConfig& c = setup.config;
    nlohmann::json j;
    j["case"] = case_kind_name(c.kind);
    j["resolution"] = c.resolution;
    j["parameters"] = {{"laplace", c.laplace},   {"sigma", c.sigma},
                       {"theta_deg", c.theta_deg}, {"fiber_d", c.fiber_d},
                       {"t_end", setup.t_end},   {"sample_every", c.sample_every}};
    j["grid"] = {{"nx", setup.grid.nx},
                 {"ny", setup.grid.ny},
                 {"dx", setup.grid.dx},
                 {"dy", setup.grid.dy},
                 {"axisymmetric", setup.grid.axisymmetric}};
    const FluidPair& f = setup.flow.fluids;
    j["fluids"] = {{"rho_l", f.rho_l}, {"rho_g", f.rho_g}, {"mu_l", f.mu_l},
                   {"mu_g", f.mu_g},   {"sigma", f.sigma},
                   {"gravity", {f.gravity.x, f.gravity.y}}};
    // NaN references serialize as null
    j["references"] = {{"kappa_exact", setup.kappa_exact},
                       {"jump_exact", setup.jump_exact},
                       {"omega_exact", setup.omega_exact},
                       {"theta_target", setup.theta_target}};
    j["result"] = {{"rows", result.rows.size()},
                   {"t_final", result.state.t},
                   {"steps", result.state.step},
                   {"liquid_volume0", result.liquid_volume0},
                   {"liquid_volume_end", result.liquid_volume_end},
                   {"theta_star_mean", result.theta_star_mean}};
    j["files"] = files;

    std::string canon = std::string(case_kind_name(c.kind)) + "|" +
                        std::to_string(c.resolution) + "|" + num(c.laplace) + "|" +
                        num(c.sigma) + "|" + num(c.theta_deg) + "|" +
                        num(c.fiber_d) + "|" + num(setup.t_end) + "|" +
                        std::to_string(c.sample_every);
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016zx", std::hash<std::string>{}(canon));
    j["config_hash"] = hex;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("manifest: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("manifest: write failed for " + path);
}

} // namespace capflow
