#pragma once

#include "gcm/simulator.hpp"
#include "gcm/state_evolution.hpp"
#include "gcm/types.hpp"

#include <vector>

namespace gcm {

// Errors for one converged state under the task's metric.
LearningCurveRow curve_row(double x, const StateEvolutionResult& result,
                           const SpectralModel& model, const TaskSpec& task,
                           const SolverOptions& opts);

// One solve per grid point, warm-starting each point from the previous
// converged state (with a cold-start retry on non-convergence). Grid points
// are solved in ascending order and reported sorted. When parallel is set,
// points are solved independently from cold starts instead.
LearningCurve run_sweep(const SpectralModel& model, const TaskSpec& task,
                        std::vector<double> alphas, const SolverOptions& opts,
                        bool parallel = false);

struct ComparisonRow {
    double x = 0.0;
    double theory_e_gen = 0.0;
    double theory_e_train = 0.0;
    double sim_e_gen = 0.0;
    double sim_e_gen_stderr = 0.0;
    double sim_e_train = 0.0;
    double sim_e_train_stderr = 0.0;
    double z_gen = 0.0;    // (theory - sim) / stderr
    double z_train = 0.0;
    bool converged = false;
};

// Theory-vs-simulation overlay on a shared alpha grid. sim_alphas, when
// nonempty, must equal alphas (MismatchedGrids otherwise); trials = 0 yields
// a theory-only table.
std::vector<ComparisonRow> run_compare(const SpectralModel& model, const TaskSpec& task,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& sim_alphas, Index sim_d,
                                       int trials, std::uint64_t seed, const SolverOptions& opts);

}  // namespace gcm
