#pragma once

#include <string>

#include "stokes/adapt.hpp"

namespace stokes {

/// Run settings shared by the CLI commands. Config files hold one
/// "key = value" per line with '#' comments; flags override file values.
struct RunConfig {
    double theta = 0.7;
    double eps = 1e-9;
    int max_iter = 10;
    int quad_degree = 8;
    int error_quad_degree = 12;
    std::string error_problem = "third";  // first | second | third
    std::string out_dir = "out";
    int threads = 1;
    bool no_timings = false;
    std::string bc;  // solve command: example1 | cavity | zero

    void validate(bool require_bc) const;  // throws std::invalid_argument
    LoopConfig loop_config() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

/// Exit codes: 0 success, 1 numerical failure, 2 usage or parse error.
int cmd_example1(const RunConfig& cfg);
int cmd_example2(const RunConfig& cfg);
int cmd_solve(const std::string& mesh_path, const std::string& config_path, const RunConfig& cfg,
              const std::vector<std::string>& overridden_keys);

}  // namespace stokes
