#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stokes/assembly.hpp"
#include "stokes/estimator.hpp"
#include "stokes/mesh.hpp"

namespace stokes {

struct ExactSolution {
    std::function<Vec2(Vec2)> velocity;
    std::function<std::array<Vec2, 2>(Vec2)> velocity_gradient;  // rows grad u1, grad u2
    std::function<double(Vec2)> pressure;
};

enum class MarkingMode { Dorfler, Uniform };

struct LoopConfig {
    double theta = 0.7;
    double eps = 1e-9;
    int max_iterations = 10;
    int quad_degree = 8;
    int error_quad_degree = 12;
    ErrorProblem error_problem = ErrorProblem::Diagonal;
    MarkingMode marking = MarkingMode::Dorfler;
    int threads = 1;
    long long max_dof = 0;  // stop refining once the Taylor-Hood dof count reaches this (0: off)
    long long validation_dof_guard = 150000;  // full/Schur paths fall back to diagonal above this
    double min_angle_floor_deg = 10.0;        // monitored only; violations warn on stderr

    void validate() const;
};

struct IterationRecord {
    int m = 0;
    int n_triangles = 0;
    long long dof = 0;  // Taylor-Hood dofs: velocity nodes x2 + pressure nodes
    long long bubble_n_v = 0;
    long long bubble_n_p = 0;
    double eta_g = 0.0;
    std::optional<double> error;
    std::optional<double> kappa;
    int marked = 0;
    double t_solve = 0.0, t_estimate = 0.0, t_mark = 0.0, t_refine = 0.0;
};

struct ProblemSpec {
    Mesh initial_mesh;
    VectorField dirichlet;     // boundary data g (zero if empty)
    VectorField body_force;    // f (zero if empty)
    std::optional<ExactSolution> exact;
};

struct IterationState {
    const Mesh& mesh;
    const DofMaps& dofs;
    const THSolution& solution;
    const LocalEstimates& locals;
    const GlobalEstimate& global;
    const IterationRecord& record;
};
using IterationCallback = std::function<void(const IterationState&)>;

struct LoopResult {
    std::vector<IterationRecord> records;
    Mesh final_mesh;
    THSolution final_solution;
};

/// Minimal-cardinality set S with sum_{T in S} eta2 >= theta * sum eta2,
/// chosen by descending sort with ties broken toward smaller element id.
/// All-zero estimates yield an empty set.
std::vector<int> dorfler_mark(const std::vector<double>& eta_sq, double theta);
std::vector<int> dorfler_mark(const LocalEstimates& locals, double theta);

/// SOLVE -> ESTIMATE -> MARK -> REFINE until eta_G <= eps or the iteration or
/// dof budget is exhausted. Deterministic for a fixed configuration.
LoopResult adaptive_loop(const ProblemSpec& problem, const LoopConfig& config,
                         const IterationCallback& callback = {});

long long taylor_hood_dof_count(const Mesh& mesh);

std::string records_csv(const std::vector<IterationRecord>& records, bool with_timings);

}  // namespace stokes
