#include "gcm/io.hpp"

#include "gcm/feature_models.hpp"
#include "gcm/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gcm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("gcm_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Path of the built CLI binary, passed through the environment by ctest.
const char* cli_bin() { return std::getenv("GCM_CLI_BIN"); }

int run_cli(const std::string& args) {
    REQUIRE(cli_bin() != nullptr);
    const std::string cmd = std::string(cli_bin()) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("matrix round trip: csv and binary") {
    const fs::path dir = temp_dir();
    GaussianSampler rng(1);
    MatrixXd m(5, 3);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 3; ++j) m(i, j) = rng();

    write_matrix_csv(dir / "m.csv", m);
    CHECK(read_matrix_csv(dir / "m.csv").isApprox(m, 1e-15));

    write_matrix_binary(dir / "m.bin", m);
    CHECK(read_matrix_binary(dir / "m.bin").isApprox(m));  // bit-exact

    CHECK(read_matrix_auto(dir / "m.csv").isApprox(m, 1e-15));
    CHECK(read_matrix_auto(dir / "m.bin").isApprox(m));
}

TEST_CASE("spectral model csv round trip") {
    const fs::path dir = temp_dir();
    const SpectralModel model = powerlaw_kernel_model(16, 2.0, 1.5);
    write_spectral_model_csv(dir / "model.csv", model);
    const SpectralModel back = read_spectral_model_csv(dir / "model.csv");
    CHECK(back.rho == doctest::Approx(model.rho).epsilon(1e-15));
    CHECK(back.gamma == model.gamma);
    CHECK(back.eigenvalues.isApprox(model.eigenvalues, 1e-15));
    CHECK(back.teacher_projection.isApprox(model.teacher_projection, 1e-15));

    const std::string text = slurp(dir / "model.csv");
    CHECK(text.find("# rho=") == 0);
    CHECK(text.find("omega,teacher_projection") != std::string::npos);
}

TEST_CASE("covariance triple bundle round trip") {
    const fs::path dir = temp_dir() / "triple";
    CovarianceTriple t;
    t.psi = MatrixXd::Identity(3, 3);
    t.phi = 0.5 * MatrixXd::Identity(3, 3);
    t.omega = MatrixXd::Identity(3, 3);
    t.theta0 = VectorXd::Ones(3);
    write_covariance_triple(dir, t);
    const CovarianceTriple back = read_covariance_triple(dir);
    CHECK(back.psi.isApprox(t.psi));
    CHECK(back.phi.isApprox(t.phi));
    CHECK(back.theta0.isApprox(t.theta0));
}

TEST_CASE("cli solve: vanilla ridge") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "cfg.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 16}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1, "metric": "mse"},
      "alpha": 2.0
    })";
    const int rc = run_cli("solve --config " + (dir / "cfg.json").string() + " --out " +
                           (dir / "out.json").string());
    CHECK(rc == 0);
    const std::string out = slurp(dir / "out.json");
    CHECK(out.find("\"e_gen\"") != std::string::npos);
    CHECK(out.find("\"config_echo\"") != std::string::npos);
    CHECK(out.find("\"converged\": true") != std::string::npos);

    // Optional regularized training objective.
    std::ofstream(dir / "cfg_reg.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 16}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1, "metric": "mse"},
      "alpha": 2.0,
      "include_regularizer": true
    })";
    CHECK(run_cli("solve --config " + (dir / "cfg_reg.json").string() + " --out " +
                  (dir / "out_reg.json").string()) == 0);
    CHECK(slurp(dir / "out_reg.json").find("\"e_train_regularized\"") != std::string::npos);
}

TEST_CASE("cli sweep: reruns are byte-identical and schema-stable") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "cfg.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 8}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": {"from": 0.5, "to": 2.0, "step": 0.5}
    })";
    const std::string base = "sweep --config " + (dir / "cfg.json").string() + " --out ";
    CHECK(run_cli(base + (dir / "a.csv").string()) == 0);
    CHECK(run_cli(base + (dir / "b.csv").string()) == 0);
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.find("alpha,e_gen,e_train,V,q,m,converged,iterations") != std::string::npos);

    // A single-point grid reduces to solve-like output with one row.
    std::ofstream(dir / "one.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 8}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": [1.5]
    })";
    CHECK(run_cli("sweep --config " + (dir / "one.json").string() + " --out " +
                  (dir / "one.csv").string()) == 0);
    const std::string one = slurp(dir / "one.csv");
    int data_lines = 0;
    for (std::size_t pos = one.find('\n'); pos != std::string::npos; pos = one.find('\n', pos + 1))
        ++data_lines;
    CHECK(data_lines == 3);  // metadata + header + one row
}

TEST_CASE("cli: partial convergence exits with code 2") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "cfg.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 8}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": [1.0, 2.0],
      "solver": {"max_iter": 2}
    })";
    CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "out.csv").string()) == 2);
    CHECK(slurp(dir / "out.csv").find(",0,2\n") != std::string::npos);  // converged=0 rows
}

TEST_CASE("cli: usage errors exit with code 1") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "bad.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 8}, "spectrum_file": "x.csv"},
      "task": {"lambda": 0.1},
      "alpha": 1.0
    })";
    CHECK(run_cli("solve --config " + (dir / "bad.json").string() + " --out " +
                  (dir / "out.json").string()) == 1);
    CHECK(run_cli("solve --config " + (dir / "missing.json").string() + " --out " +
                  (dir / "out.json").string()) == 1);
}

TEST_CASE("cli estimate: data file to spectral model") {
    const fs::path dir = temp_dir();
    GaussianSampler rng(2);
    MatrixXd table(300, 5);  // 4 features + label column
    for (Index i = 0; i < 300; ++i) {
        for (Index j = 0; j < 4; ++j) table(i, j) = rng();
        table(i, 4) = table(i, 0) >= 0.0 ? 1.0 : -1.0;
    }
    write_matrix_csv(dir / "data.csv", table);
    std::ofstream(dir / "cfg.json") << R"({"model": {"data_file": ")" +
                                           (dir / "data.csv").string() + R"("}})";
    CHECK(run_cli("estimate --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "model.csv").string()) == 0);
    const SpectralModel model = read_spectral_model_csv(dir / "model.csv");
    CHECK(model.d() == 4);
    CHECK(model.rho == doctest::Approx(1.0));
}

TEST_CASE("cli compare: joined csv with z-scores") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "cfg.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 64}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": [0.5, 1.0],
      "simulation": {"trials": 4, "seed": 11}
    })";
    CHECK(run_cli("compare --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "cmp.csv").string()) == 0);
    const std::string out = slurp(dir / "cmp.csv");
    CHECK(out.find("alpha,theory_e_gen,theory_e_train,sim_e_gen") != std::string::npos);

    // No simulation section: theory-only table, still exit 0.
    std::ofstream(dir / "theory_only.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 64}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": [0.5, 1.0]
    })";
    CHECK(run_cli("compare --config " + (dir / "theory_only.json").string() + " --out " +
                  (dir / "cmp0.csv").string()) == 0);
    CHECK(slurp(dir / "cmp0.csv").find("alpha,theory_e_gen") != std::string::npos);

    // Mismatched grids are a hard error.
    std::ofstream(dir / "bad.json") << R"({
      "model": {"builtin": {"kind": "vanilla", "d": 64}},
      "task": {"loss": "square", "teacher": "linear", "lambda": 0.1},
      "alphas": [0.5, 1.0],
      "simulation": {"trials": 4, "alphas": [0.5]}
    })";
    CHECK(run_cli("compare --config " + (dir / "bad.json").string() + " --out " +
                  (dir / "cmp2.csv").string()) == 1);
}

TEST_CASE("cli kernel-scaling: powerlaw csv schema") {
    const fs::path dir = temp_dir();
    std::ofstream(dir / "cfg.json") << R"({
      "powerlaw": {"a": 2.0, "b": 1.5, "lambda": 0.001, "cutoff": 100000,
                    "n_values": [100, 200, 400, 800]},
      "slope_report": ")" + (dir / "slopes.json").string() + R"("
    })";
    CHECK(run_cli("kernel-scaling --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "ks.csv").string()) == 0);
    const std::string out = slurp(dir / "ks.csv");
    CHECK(out.find("n,z,eps_g,regime") != std::string::npos);
    CHECK(out.find("effective_regularization") != std::string::npos);
    const std::string slopes = slurp(dir / "slopes.json");
    CHECK(slopes.find("fitted_slope") != std::string::npos);
}
