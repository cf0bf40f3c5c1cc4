#pragma once

#include <string>
#include <vector>

#include "capflow/bench.hpp"

namespace capflow {

// One benchmark invocation: the case knobs plus output and sweep settings.
struct RunConfig {
    CaseConfig case_cfg;
    std::string out_dir = "out";
    int snapshots = 0;              // field snapshots per run, 0 disables
    int threads = 1;                // concurrent sweep jobs
    std::vector<int> resolutions;   // sweep list; empty = {10, 20, 40}
};

const char* case_kind_name(CaseKind kind);
CaseKind case_kind_from_name(const std::string& name); // throws on unknown name

// Flat key = value lines, '#' or ';' comments, blank lines ignored.
// Unknown keys are rejected by name.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

} // namespace capflow
