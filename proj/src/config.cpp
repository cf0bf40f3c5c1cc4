#include "capflow/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace capflow {

namespace {

constexpr std::array<std::pair<const char*, CaseKind>, 8> kKinds{{
    {"static_prescribed", CaseKind::static_prescribed},
    {"static_laplace", CaseKind::static_laplace},
    {"translating", CaseKind::translating},
    {"oscillating", CaseKind::oscillating},
    {"rising_bubble", CaseKind::rising_bubble},
    {"sessile", CaseKind::sessile},
    {"suspended_2d", CaseKind::suspended_2d},
    {"suspended_axisym", CaseKind::suspended_axisym},
}};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& val) {
    double v = 0.0;
    const char* end = val.data() + val.size();
    const auto [p, ec] = std::from_chars(val.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw std::runtime_error("config: bad number for '" + key + "': " + val);
    return v;
}

int parse_int(const std::string& key, const std::string& val) {
    int v = 0;
    const char* end = val.data() + val.size();
    const auto [p, ec] = std::from_chars(val.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw std::runtime_error("config: bad integer for '" + key + "': " + val);
    return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& val) {
    std::vector<int> out;
    std::stringstream ss(val);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::runtime_error("config: empty entry in '" + key + "'");
        out.push_back(parse_int(key, item));
    }
    if (out.empty())
        throw std::runtime_error("config: empty list for '" + key + "'");
    return out;
}

} // namespace

const char* case_kind_name(CaseKind kind) {
    for (const auto& [name, k] : kKinds)
        if (k == kind) return name;
    throw std::logic_error("case_kind_name: unmapped kind");
}

CaseKind case_kind_from_name(const std::string& name) {
    for (const auto& [n, k] : kKinds)
        if (name == n) return k;
    std::string known;
    for (const auto& [n, k] : kKinds) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    throw std::runtime_error("config: unknown case '" + name + "' (known: " + known + ")");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig rc;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key or value");

        if (key == "case") rc.case_cfg.kind = case_kind_from_name(val);
        else if (key == "resolution") rc.case_cfg.resolution = parse_int(key, val);
        else if (key == "laplace") rc.case_cfg.laplace = parse_double(key, val);
        else if (key == "sigma") rc.case_cfg.sigma = parse_double(key, val);
        else if (key == "theta_deg") rc.case_cfg.theta_deg = parse_double(key, val);
        else if (key == "fiber_d") rc.case_cfg.fiber_d = parse_double(key, val);
        else if (key == "t_end") rc.case_cfg.t_end = parse_double(key, val);
        else if (key == "sample_every") rc.case_cfg.sample_every = parse_int(key, val);
        else if (key == "out_dir") rc.out_dir = val;
        else if (key == "snapshots") rc.snapshots = parse_int(key, val);
        else if (key == "threads") rc.threads = parse_int(key, val);
        else if (key == "resolutions") rc.resolutions = parse_int_list(key, val);
        else
            throw std::runtime_error("config: unknown key '" + key + "'");
    }
    return rc;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace capflow
