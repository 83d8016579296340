// gcm: command-line front end for the Gaussian covariate model solver.
//
// Subcommands: solve, sweep, simulate, compare, kernel-scaling, estimate.
// Each takes a JSON config (--config) and an output path (--out). Configs
// are echoed into every artifact so outputs are self-describing. Exit codes:
// 0 on success with full convergence, 2 on partial convergence, 1 on usage
// or config errors.

#include "gcm/errors.hpp"
#include "gcm/feature_models.hpp"
#include "gcm/io.hpp"
#include "gcm/kernel_scaling.hpp"
#include "gcm/simulator.hpp"
#include "gcm/spectral.hpp"
#include "gcm/state_evolution.hpp"
#include "gcm/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using json = nlohmann::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json cfg;
    in >> cfg;
    return cfg;
}

gcm::TaskSpec parse_task(const json& cfg) {
    if (!cfg.contains("task")) throw std::runtime_error("config: missing \"task\"");
    const json& t = cfg.at("task");
    gcm::TaskSpec task;
    task.loss = gcm::loss_from_string(t.value("loss", "square"));
    task.teacher_fn = gcm::teacher_from_string(t.value("teacher", "linear"));
    task.lambda = t.value("lambda", 1e-2);
    task.metric = gcm::metric_from_string(t.value("metric", task.teacher_fn == gcm::TeacherFn::Sign
                                                               ? "zero_one"
                                                               : "mse"));
    task.validate();
    return task;
}

gcm::SolverOptions parse_solver(const json& cfg) {
    gcm::SolverOptions opts;
    if (cfg.contains("solver")) {
        const json& s = cfg.at("solver");
        opts.damping = s.value("damping", opts.damping);
        opts.tol = s.value("tol", opts.tol);
        opts.max_iter = s.value("max_iter", opts.max_iter);
        opts.quad_nodes = s.value("quad_nodes", opts.quad_nodes);
    }
    opts.validate();
    return opts;
}

gcm::VectorXd parse_vector(const json& arr) {
    gcm::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<gcm::Index>(i)) = arr[i].get<double>();
    return v;
}

// Exactly one model source: builtin | spectrum_file | data_file.
gcm::SpectralModel parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw std::runtime_error("config: missing \"model\"");
    const json& m = cfg.at("model");
    const int sources = static_cast<int>(m.contains("builtin")) +
                        static_cast<int>(m.contains("spectrum_file")) +
                        static_cast<int>(m.contains("data_file")) +
                        static_cast<int>(m.contains("triple_dir"));
    if (sources != 1)
        throw std::runtime_error(
            "config: model must name exactly one source (builtin | spectrum_file | data_file | "
            "triple_dir)");

    gcm::SpectralModel model;
    if (m.contains("spectrum_file")) {
        model = gcm::read_spectral_model_csv(m.at("spectrum_file").get<std::string>());
    } else if (m.contains("data_file")) {
        const gcm::MatrixXd table = gcm::read_matrix_auto(m.at("data_file").get<std::string>());
        if (table.cols() < 2) throw std::runtime_error("data file needs features plus a label column");
        model = gcm::estimate_from_data(table.leftCols(table.cols() - 1),
                                        table.col(table.cols() - 1))
                    .model;
    } else if (m.contains("triple_dir")) {
        model = gcm::spectral_reduce(
            gcm::read_covariance_triple(m.at("triple_dir").get<std::string>()));
    } else {
        const json& b = m.at("builtin");
        const std::string kind = b.value("kind", "vanilla");
        if (kind == "vanilla") {
            const gcm::Index d = b.value("d", 100);
            gcm::VectorXd theta0 = b.contains("theta0") ? parse_vector(b.at("theta0"))
                                                        : gcm::VectorXd::Ones(d).eval();
            std::optional<double> rho_target;
            if (b.contains("rho_target")) rho_target = b.at("rho_target").get<double>();
            model = gcm::vanilla_model(d, theta0, rho_target);
        } else if (kind == "kernel_powerlaw") {
            model = gcm::powerlaw_kernel_model(b.value("d", 1000), b.value("a", 2.0),
                                               b.value("b", 1.5));
        } else if (kind == "kernel_diagonal") {
            model = gcm::kernel_diagonal_model(parse_vector(b.at("omega")),
                                               parse_vector(b.at("theta0")));
        } else if (kind == "random_features") {
            gcm::RandomFeatureSpec spec;
            spec.p = b.value("p", 100);
            spec.d = b.value("d", 100);
            spec.nonlinearity = gcm::nonlinearity_from_string(b.value("nonlinearity", "erf"));
            spec.seed = b.value("seed", 0);
            model = gcm::spectral_reduce(gcm::random_features_triple(spec));
        } else {
            throw std::runtime_error("unknown builtin model kind: " + kind);
        }
    }
    const double noise = m.value("noise_variance", 0.0);
    if (noise > 0.0) model = gcm::with_label_noise(std::move(model), noise);
    return model;
}

std::vector<double> parse_grid(const json& cfg, const char* key) {
    if (!cfg.contains(key)) throw std::runtime_error(std::string("config: missing \"") + key + '"');
    const json& g = cfg.at(key);
    std::vector<double> grid;
    if (g.is_array()) {
        for (const auto& x : g) grid.push_back(x.get<double>());
    } else {
        const double from = g.at("from").get<double>();
        const double to = g.at("to").get<double>();
        const double step = g.at("step").get<double>();
        if (!(step > 0.0)) throw std::runtime_error("grid step must be > 0");
        for (double x = from; x <= to + 0.5 * step; x += step) grid.push_back(x);
    }
    if (grid.empty()) throw std::runtime_error("empty grid");
    return grid;
}

json echo_defaults(const json& cfg, const gcm::TaskSpec& task, const gcm::SolverOptions& opts) {
    json echo = cfg;
    echo["task"] = {{"loss", gcm::to_string(task.loss)},
                    {"teacher", gcm::to_string(task.teacher_fn)},
                    {"lambda", task.lambda},
                    {"metric", gcm::to_string(task.metric)}};
    echo["solver"] = {{"damping", opts.damping},
                      {"tol", opts.tol},
                      {"max_iter", opts.max_iter},
                      {"quad_nodes", opts.quad_nodes}};
    return echo;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output: " + path);
    out << text;
}

int cmd_solve(const json& cfg, const std::string& out_path) {
    const gcm::TaskSpec task = parse_task(cfg);
    const gcm::SolverOptions opts = parse_solver(cfg);
    const gcm::SpectralModel model = parse_model(cfg);
    const double alpha = cfg.at("alpha").get<double>();

    const gcm::StateEvolutionResult res = gcm::solve(model, task, alpha, opts);
    const gcm::LearningCurveRow row = gcm::curve_row(alpha, res, model, task, opts);

    json out;
    out["alpha"] = alpha;
    out["overlaps"] = {{"V", res.overlaps.v}, {"q", res.overlaps.q}, {"m", res.overlaps.m}};
    out["hats"] = {{"V_hat", res.hats.v_hat},
                   {"q_hat", res.hats.q_hat},
                   {"m_hat", res.hats.m_hat}};
    out["e_gen"] = row.e_gen;
    out["e_train"] = row.e_train;
    if (cfg.value("include_regularizer", false)) {
        const double norm_sq = gcm::estimator_norm_sq(res.hats, model, task.lambda);
        out["norm_sq"] = norm_sq;
        out["e_train_regularized"] = gcm::training_objective_with_regularizer(
            row.e_train, task.loss, task.lambda, norm_sq, alpha);
    }
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["residual"] = res.residual;
    out["config_echo"] = echo_defaults(cfg, task, opts);
    write_text(out_path, out.dump(2) + "\n");
    return res.converged ? 0 : 2;
}

int cmd_sweep(const json& cfg, const std::string& out_path, bool parallel) {
    const gcm::TaskSpec task = parse_task(cfg);
    const gcm::SolverOptions opts = parse_solver(cfg);
    const gcm::SpectralModel model = parse_model(cfg);
    const std::vector<double> alphas = parse_grid(cfg, "alphas");

    const gcm::LearningCurve curve = gcm::run_sweep(model, task, alphas, opts, parallel);
    gcm::write_learning_curve_csv(out_path, curve, echo_defaults(cfg, task, opts).dump());
    return curve.all_converged() ? 0 : 2;
}

int cmd_simulate(const json& cfg, const std::string& out_path, std::optional<std::uint64_t> seed) {
    const gcm::TaskSpec task = parse_task(cfg);
    const gcm::SpectralModel model = parse_model(cfg);
    if (!cfg.contains("simulation")) throw std::runtime_error("config: missing \"simulation\"");
    const json& s = cfg.at("simulation");

    gcm::SimulationConfig config;
    config.d = model.d();
    if (s.contains("n"))
        config.n = s.at("n").get<gcm::Index>();
    else
        config.n = static_cast<gcm::Index>(
            std::llround(s.at("alpha").get<double>() * static_cast<double>(config.d)));
    config.trials = s.value("trials", 10);
    config.seed = seed ? *seed : s.value("seed", 0);
    config.task = task;

    const gcm::SimulationReport rep = gcm::run(config, model);
    auto dump = [](const gcm::Estimate& e) {
        return json{{"mean", e.mean}, {"stderr", e.std_error}};
    };
    json out;
    out["e_gen"] = dump(rep.e_gen);
    out["e_train"] = dump(rep.e_train);
    out["q_emp"] = dump(rep.q_emp);
    out["m_emp"] = dump(rep.m_emp);
    out["norm_sq"] = dump(rep.norm_sq);
    out["config_echo"] = echo_defaults(cfg, task, gcm::SolverOptions{});
    out["config_echo"]["simulation"] = {{"d", config.d},
                                        {"n", config.n},
                                        {"trials", config.trials},
                                        {"seed", config.seed}};
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_compare(const json& cfg, const std::string& out_path, std::optional<std::uint64_t> seed) {
    const gcm::TaskSpec task = parse_task(cfg);
    const gcm::SolverOptions opts = parse_solver(cfg);
    const gcm::SpectralModel model = parse_model(cfg);
    const std::vector<double> alphas = parse_grid(cfg, "alphas");

    std::vector<double> sim_alphas;
    int trials = 0;
    std::uint64_t sim_seed = seed.value_or(0);
    if (cfg.contains("simulation")) {
        const json& s = cfg.at("simulation");
        trials = s.value("trials", 0);
        if (!seed) sim_seed = s.value("seed", 0);
        if (s.contains("alphas")) sim_alphas = parse_grid(cfg.at("simulation"), "alphas");
    }
    if (trials == 0)
        std::cerr << "compare: no simulation trials requested; emitting theory-only table\n";

    const auto rows =
        gcm::run_compare(model, task, alphas, sim_alphas, model.d(), trials, sim_seed, opts);

    std::string csv = "# " + echo_defaults(cfg, task, opts).dump() + "\n";
    csv += "alpha,theory_e_gen,theory_e_train,sim_e_gen,sim_e_gen_stderr,sim_e_train,"
           "sim_e_train_stderr,z_gen,z_train,converged\n";
    bool all_converged = true;
    for (const auto& r : rows) {
        all_converged = all_converged && r.converged;
        csv += gcm::format_double(r.x) + ',' + gcm::format_double(r.theory_e_gen) + ',' +
               gcm::format_double(r.theory_e_train) + ',' + gcm::format_double(r.sim_e_gen) + ',' +
               gcm::format_double(r.sim_e_gen_stderr) + ',' + gcm::format_double(r.sim_e_train) +
               ',' + gcm::format_double(r.sim_e_train_stderr) + ',' +
               gcm::format_double(r.z_gen) + ',' + gcm::format_double(r.z_train) + ',' +
               (r.converged ? "1" : "0") + '\n';
    }
    write_text(out_path, csv);
    return all_converged ? 0 : 2;
}

int cmd_kernel_scaling(const json& cfg, const std::string& out_path) {
    if (cfg.contains("powerlaw")) {
        const json& p = cfg.at("powerlaw");
        gcm::PowerLawSpec spec;
        spec.a = p.at("a").get<double>();
        spec.b = p.at("b").get<double>();
        spec.lambda = p.at("lambda").get<double>();
        spec.cutoff = p.value("cutoff", 0);
        for (const auto& n : p.at("n_values")) spec.n_values.push_back(n.get<std::int64_t>());

        const auto points = gcm::powerlaw_curve(spec);
        json echo = cfg;
        echo["powerlaw"]["cutoff"] = spec.effective_cutoff();
        echo["powerlaw"]["numerator_tail_bound"] = gcm::powerlaw_tail_bound(spec);
        std::string csv = "# " + echo.dump() + "\n";
        csv += "n,z,eps_g,regime\n";
        for (const auto& pt : points)
            csv += std::to_string(pt.n) + ',' + gcm::format_double(pt.z) + ',' +
                   gcm::format_double(pt.eps_g) + ',' + gcm::to_string(pt.regime) + '\n';
        write_text(out_path, csv);

        if (cfg.contains("slope_report")) {
            std::vector<double> ns, es;
            for (const auto& pt : points) {
                ns.push_back(static_cast<double>(pt.n));
                es.push_back(pt.eps_g);
            }
            json rep;
            rep["fitted_slope"] = gcm::fit_loglog_slope(ns, es);
            rep["regime_threshold_n"] = std::pow(spec.lambda, -1.0 / (spec.b - 1.0));
            rep["expected_slope_effective_regularization"] =
                -std::min(spec.a - 1.0, 2.0 * spec.b);
            rep["expected_slope_lambda_dominated"] =
                -std::min(spec.a - 1.0, 2.0 * spec.b) / spec.b;
            rep["config_echo"] = echo;
            write_text(cfg.at("slope_report").get<std::string>(), rep.dump(2) + "\n");
        }
        return 0;
    }

    // Finite-dimensional kernel curve on a diagonal model.
    const gcm::SpectralModel model = parse_model(cfg);
    const double lambda = cfg.at("lambda").get<double>();
    std::vector<std::int64_t> n_values;
    for (double x : parse_grid(cfg, "n_values"))
        n_values.push_back(static_cast<std::int64_t>(std::llround(x)));
    const gcm::LearningCurve curve = gcm::finite_d_kernel_curve(model, lambda, n_values);
    gcm::write_learning_curve_csv(out_path, curve, json(cfg).dump());
    return 0;
}

int cmd_estimate(const json& cfg, const std::string& out_path) {
    if (!cfg.contains("model") || !cfg.at("model").contains("data_file"))
        throw std::runtime_error("estimate: config must point at model.data_file");
    const gcm::MatrixXd table =
        gcm::read_matrix_auto(cfg.at("model").at("data_file").get<std::string>());
    if (table.cols() < 2) throw std::runtime_error("data file needs features plus a label column");
    const auto est =
        gcm::estimate_from_data(table.leftCols(table.cols() - 1), table.col(table.cols() - 1));
    gcm::write_spectral_model_csv(out_path, est.model);
    std::cerr << "estimate: wrote spectral model (d=" << est.model.d() << ", n_tot=" << est.n_tot
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic learning curves for the Gaussian covariate teacher-student model"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    bool parallel = false;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub, bool with_parallel, bool with_seed) {
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out_path, "output path")->required();
        if (with_parallel)
            sub->add_flag("--parallel", parallel,
                          "solve grid points concurrently from cold starts");
        if (with_seed) sub->add_option("--seed", seed, "override the simulation seed");
    };

    add_common(app.add_subcommand("solve", "single fixed-point solve"), false, false);
    add_common(app.add_subcommand("sweep", "learning-curve sweep over alpha"), true, false);
    add_common(app.add_subcommand("simulate", "Monte Carlo ERM oracle"), false, true);
    add_common(app.add_subcommand("compare", "theory vs simulation overlay"), false, true);
    add_common(app.add_subcommand("kernel-scaling", "power-law/finite-d kernel analysis"), false,
               false);
    add_common(app.add_subcommand("estimate", "empirical covariance estimation from data"), false,
               false);

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path);
        if (app.got_subcommand("solve")) return cmd_solve(cfg, out_path);
        if (app.got_subcommand("sweep")) return cmd_sweep(cfg, out_path, parallel);
        if (app.got_subcommand("simulate")) return cmd_simulate(cfg, out_path, seed);
        if (app.got_subcommand("compare")) return cmd_compare(cfg, out_path, seed);
        if (app.got_subcommand("kernel-scaling")) return cmd_kernel_scaling(cfg, out_path);
        if (app.got_subcommand("estimate")) return cmd_estimate(cfg, out_path);
    } catch (const std::exception& e) {
        std::cerr << "gcm: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
