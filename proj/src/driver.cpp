#include "stokes/driver.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stokes/bench.hpp"

namespace stokes {

namespace fs = std::filesystem;

void RunConfig::validate(bool require_bc) const {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("theta must be in (0,1), got " + std::to_string(theta));
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (max_iter < 0) throw std::invalid_argument("max-iter must be >= 0");
    if (quad_degree < 1 || quad_degree > 14)
        throw std::invalid_argument("quad-degree must be in 1..14");
    if (error_quad_degree < 1 || error_quad_degree > 14)
        throw std::invalid_argument("error-quad-degree must be in 1..14");
    if (error_problem != "first" && error_problem != "second" && error_problem != "third")
        throw std::invalid_argument("error-problem must be first, second, or third");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (require_bc) {
        if (bc.empty()) throw std::invalid_argument("missing required key: bc");
        if (bc != "example1" && bc != "cavity" && bc != "zero")
            throw std::invalid_argument("bc must be example1, cavity, or zero");
    }
}

LoopConfig RunConfig::loop_config() const {
    LoopConfig lc;
    lc.theta = theta;
    lc.eps = eps;
    lc.max_iterations = max_iter;
    lc.quad_degree = quad_degree;
    lc.error_quad_degree = error_quad_degree;
    lc.error_problem = error_problem == "first"    ? ErrorProblem::Full
                       : error_problem == "second" ? ErrorProblem::DiagonalVelocity
                                                   : ErrorProblem::Diagonal;
    lc.threads = threads;
    return lc;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail("expected 'key = value'");
        auto to_double = [&](const std::string& v) {
            size_t pos = 0;
            double d = 0.0;
            bool ok = true;
            try {
                d = std::stod(v, &pos);
            } catch (const std::exception&) {
                ok = false;
            }
            if (!ok || pos != v.size()) fail("bad value for key " + key + ": " + v);
            return d;
        };
        auto to_int = [&](const std::string& v) {
            size_t pos = 0;
            int i = 0;
            bool ok = true;
            try {
                i = std::stoi(v, &pos);
            } catch (const std::exception&) {
                ok = false;
            }
            if (!ok || pos != v.size()) fail("bad value for key " + key + ": " + v);
            return i;
        };
        if (key == "theta") base.theta = to_double(val);
        else if (key == "eps") base.eps = to_double(val);
        else if (key == "max_iter") base.max_iter = to_int(val);
        else if (key == "quad_degree") base.quad_degree = to_int(val);
        else if (key == "error_quad_degree") base.error_quad_degree = to_int(val);
        else if (key == "error_problem") base.error_problem = val;
        else if (key == "out") base.out_dir = val;
        else if (key == "threads") base.threads = to_int(val);
        else if (key == "no_timings") base.no_timings = (val == "true" || val == "1");
        else if (key == "bc") base.bc = val;
        else fail("unknown key: " + key);
    }
    return base;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// Export meshes every iteration plus records/table at the end.
int run_with_artifacts(const ProblemSpec& problem, const RunConfig& cfg, bool with_table,
                       bool with_uniform, bool export_pressure) {
    LoopConfig lc = cfg.loop_config();
    fs::create_directories(fs::path(cfg.out_dir) / "meshes");

    std::vector<std::pair<int, std::string>> pressure_dumps;
    int last_m = 0;
    std::string last_estimates;
    IterationCallback cb = [&](const IterationState& it) {
        write_file(fs::path(cfg.out_dir) / "meshes" / ("m" + std::to_string(it.record.m) + ".txt"),
                   write_mesh_text(it.mesh));
        if (export_pressure)
            pressure_dumps.emplace_back(it.record.m, pressure_field_text(it.mesh, it.solution));
        last_m = it.record.m;
        last_estimates = local_estimates_csv(it.locals);
    };

    LoopResult result = adaptive_loop(problem, lc, cb);
    write_file(fs::path(cfg.out_dir) / ("estimates_m" + std::to_string(last_m) + ".csv"),
               last_estimates);
    write_file(fs::path(cfg.out_dir) / "records.csv", records_csv(result.records, !cfg.no_timings));
    if (with_table)
        write_file(fs::path(cfg.out_dir) / "table.csv",
                   convergence_table_csv(convergence_table(result.records)));
    if (with_uniform) {
        LoopConfig ulc = lc;
        ulc.marking = MarkingMode::Uniform;
        ulc.max_iterations = std::min(lc.max_iterations, 4);
        ulc.max_dof = 0;
        LoopResult uni = adaptive_loop(problem, ulc);
        write_file(fs::path(cfg.out_dir) / "uniform_records.csv",
                   records_csv(uni.records, !cfg.no_timings));
    }
    if (export_pressure && !pressure_dumps.empty()) {
        write_file(fs::path(cfg.out_dir) / "pressure_m0.txt", pressure_dumps.front().second);
        const auto& last = pressure_dumps.back();
        write_file(fs::path(cfg.out_dir) / ("pressure_m" + std::to_string(last.first) + ".txt"),
                   last.second);
    }

    const auto& final_rec = result.records.back();
    std::printf("iterations: %d  triangles: %d  dof: %lld  eta_G: %.6g", final_rec.m,
                final_rec.n_triangles, final_rec.dof, final_rec.eta_g);
    if (final_rec.error) std::printf("  error: %.6g  kappa: %.4f", *final_rec.error,
                                     final_rec.kappa.value_or(0.0));
    std::printf("\n");
    return 0;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int cmd_example1(const RunConfig& cfg) {
    return guarded([&] {
        cfg.validate(false);
        return run_with_artifacts(example1_problem(), cfg, true, true, false);
    });
}

int cmd_example2(const RunConfig& cfg) {
    return guarded([&] {
        cfg.validate(false);
        return run_with_artifacts(example2_problem(), cfg, false, false, true);
    });
}

int cmd_solve(const std::string& mesh_path, const std::string& config_path, const RunConfig& cli,
              const std::vector<std::string>& overridden_keys) {
    return guarded([&] {
        RunConfig cfg = parse_config_file(config_path);
        // Flags override file values.
        std::set<std::string> keys(overridden_keys.begin(), overridden_keys.end());
        if (keys.count("theta")) cfg.theta = cli.theta;
        if (keys.count("eps")) cfg.eps = cli.eps;
        if (keys.count("max-iter")) cfg.max_iter = cli.max_iter;
        if (keys.count("quad-degree")) cfg.quad_degree = cli.quad_degree;
        if (keys.count("error-quad-degree")) cfg.error_quad_degree = cli.error_quad_degree;
        if (keys.count("error-problem")) cfg.error_problem = cli.error_problem;
        if (keys.count("out")) cfg.out_dir = cli.out_dir;
        if (keys.count("threads")) cfg.threads = cli.threads;
        if (keys.count("no-timings")) cfg.no_timings = cli.no_timings;
        cfg.validate(true);

        std::ifstream in(mesh_path);
        if (!in) throw std::invalid_argument("cannot open mesh file: " + mesh_path);
        std::stringstream ss;
        ss << in.rdbuf();

        ProblemSpec problem;
        problem.initial_mesh = read_mesh_text(ss.str());
        bool with_table = false;
        if (cfg.bc == "example1") {
            LShapeExactSolution ex;
            LShapeExactSolution copy = ex;
            problem.dirichlet = [copy](Vec2 x) { return copy.velocity(x); };
            problem.exact = ex.as_exact();
            with_table = true;
        } else if (cfg.bc == "cavity") {
            problem.dirichlet = cavity_boundary_velocity;
        } else {
            problem.dirichlet = {};
        }
        return run_with_artifacts(problem, cfg, with_table, false, false);
    });
}

}  // namespace stokes
