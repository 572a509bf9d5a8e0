// Adaptive Stokes solver driver.
//
//   stokes_afem example1 [flags]          L-shape singular-solution study
//   stokes_afem example2 [flags]          lid-driven cavity
//   stokes_afem solve <mesh> <config>     adaptive run on a user mesh (f = 0)
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or parse error.

#include <CLI11.hpp>

#include "stokes/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Adaptive Taylor-Hood Stokes solver with a hierarchical-basis error estimator"};
    app.require_subcommand(1);

    stokes::RunConfig cfg;
    auto add_common = [&cfg](CLI::App* cmd) {
        cmd->add_option("--theta", cfg.theta, "Marking parameter in (0,1)");
        cmd->add_option("--eps", cfg.eps, "Stopping tolerance on the global estimator");
        cmd->add_option("--max-iter", cfg.max_iter, "Maximum number of refinement steps");
        cmd->add_option("--quad-degree", cfg.quad_degree, "Assembly quadrature degree")
            ->check(CLI::Range(1, 14));
        cmd->add_option("--error-quad-degree", cfg.error_quad_degree,
                        "Error-norm quadrature degree")
            ->check(CLI::Range(1, 14));
        cmd->add_option("--error-problem", cfg.error_problem,
                        "Which error problem drives the estimate: first|second|third")
            ->check(CLI::IsMember({"first", "second", "third"}));
        cmd->add_option("--out", cfg.out_dir, "Output directory");
        cmd->add_option("--threads", cfg.threads, "Element-parallel threads")->check(CLI::Range(1, 256));
        cmd->add_flag("--no-timings", cfg.no_timings, "Leave timing columns empty in CSV output");
    };

    CLI::App* ex1 = app.add_subcommand("example1", "L-shape benchmark with exact singular solution");
    add_common(ex1);
    CLI::App* ex2 = app.add_subcommand("example2", "Lid-driven cavity benchmark");
    add_common(ex2);
    CLI::App* solve = app.add_subcommand("solve", "Adaptive run on a mesh file with a config file");
    std::string mesh_path, config_path;
    solve->add_option("mesh", mesh_path, "Mesh file in the plain-text format")->required();
    solve->add_option("config", config_path, "Config file, one 'key = value' per line")->required();
    add_common(solve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto overridden = [&](CLI::App* cmd) {
        std::vector<std::string> keys;
        for (const char* name : {"--theta", "--eps", "--max-iter", "--quad-degree",
                                 "--error-quad-degree", "--error-problem", "--out", "--threads",
                                 "--no-timings"})
            if (cmd->count(name) > 0) keys.push_back(name + 2);
        return keys;
    };

    if (ex1->parsed()) return stokes::cmd_example1(cfg);
    if (ex2->parsed()) return stokes::cmd_example2(cfg);
    return stokes::cmd_solve(mesh_path, config_path, cfg, overridden(solve));
}
