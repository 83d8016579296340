#include "gcm/sweep.hpp"

#include "gcm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gcm {

LearningCurveRow curve_row(double x, const StateEvolutionResult& result,
                           const SpectralModel& model, const TaskSpec& task,
                           const SolverOptions& opts) {
    LearningCurveRow row;
    row.x = x;
    row.v = result.overlaps.v;
    row.q = result.overlaps.q;
    row.m = result.overlaps.m;
    row.converged = result.converged;
    row.iterations = result.iterations;

    if (task.metric == Metric::ZeroOne) {
        row.e_gen = classification_error(result.overlaps, model.rho);
        row.e_train = result.overlaps.q > 0.0
                          ? training_loss_quadrature(result.overlaps, model.rho, task, opts)
                          : 0.0;
    } else if (task.teacher_fn == TeacherFn::Linear) {
        const ErrorReport rep = mse_errors(result.overlaps, model.rho);
        row.e_gen = rep.e_gen;
        row.e_train = rep.e_train;
    } else {
        const ErrorReport rep = sign_teacher_mse_errors(result.overlaps, model.rho);
        row.e_gen = rep.e_gen;
        row.e_train = rep.e_train;
    }
    return row;
}

LearningCurve run_sweep(const SpectralModel& model, const TaskSpec& task,
                        std::vector<double> alphas, const SolverOptions& opts, bool parallel) {
    model.validate();
    task.validate();
    opts.validate();
    if (alphas.empty()) throw std::invalid_argument("run_sweep: empty alpha grid");
    std::sort(alphas.begin(), alphas.end());

    LearningCurve curve;
    curve.sweep_variable = "alpha";
    curve.rows.resize(alphas.size());

    if (parallel) {
        // Cold starts, independent points.
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next.fetch_add(1); i < alphas.size(); i = next.fetch_add(1)) {
                const StateEvolutionResult r = solve(model, task, alphas[i], opts);
                curve.rows[i] = curve_row(alphas[i], r, model, task, opts);
            }
        };
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t nthreads = std::min<std::size_t>(hw, alphas.size());
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(work);
        for (auto& t : pool) t.join();
        return curve;
    }

    bool have_warm = false;
    Overlaps warm;
    ConjugateOverlaps warm_hats;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        StateEvolutionResult r = have_warm
                                     ? solve_from(model, task, alphas[i], opts, warm, warm_hats)
                                     : solve(model, task, alphas[i], opts);
        if (!r.converged && have_warm) r = solve(model, task, alphas[i], opts);  // cold retry
        if (r.converged) {
            have_warm = true;
            warm = r.overlaps;
            warm_hats = r.hats;
        }
        curve.rows[i] = curve_row(alphas[i], r, model, task, opts);
    }
    return curve;
}

std::vector<ComparisonRow> run_compare(const SpectralModel& model, const TaskSpec& task,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& sim_alphas, Index sim_d,
                                       int trials, std::uint64_t seed,
                                       const SolverOptions& opts) {
    if (!sim_alphas.empty() && sim_alphas != alphas)
        throw MismatchedGrids("run_compare: theory and simulation grids differ");

    const LearningCurve theory = run_sweep(model, task, alphas, opts);
    std::vector<ComparisonRow> rows;
    rows.reserve(theory.rows.size());
    for (std::size_t i = 0; i < theory.rows.size(); ++i) {
        const auto& t = theory.rows[i];
        ComparisonRow row;
        row.x = t.x;
        row.theory_e_gen = t.e_gen;
        row.theory_e_train = t.e_train;
        row.converged = t.converged;
        if (trials > 0) {
            if (sim_d != model.d())
                throw DimensionMismatch("run_compare: simulation d must match the model dimension");
            SimulationConfig config;
            config.d = sim_d;
            config.n = static_cast<Index>(std::llround(t.x * static_cast<double>(sim_d)));
            config.trials = trials;
            config.seed = derive_stream(seed, i);
            config.task = task;
            const SimulationReport rep = run(config, model);
            row.sim_e_gen = rep.e_gen.mean;
            row.sim_e_gen_stderr = rep.e_gen.std_error;
            row.sim_e_train = rep.e_train.mean;
            row.sim_e_train_stderr = rep.e_train.std_error;
            row.z_gen = rep.e_gen.std_error > 0.0
                            ? (t.e_gen - rep.e_gen.mean) / rep.e_gen.std_error
                            : 0.0;
            row.z_train = rep.e_train.std_error > 0.0
                              ? (t.e_train - rep.e_train.mean) / rep.e_train.std_error
                              : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gcm
