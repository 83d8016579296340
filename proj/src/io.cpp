#include "gcm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

namespace gcm {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'M', 'B'};

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) fail(path, "cannot open for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) fail(path, "cannot open for writing");
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixXd& m) {
    auto out = open_out(path, std::ios::out);
    out << "# rows=" << m.rows() << " cols=" << m.cols() << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::string line;
    if (!std::getline(in, line)) fail(path, "empty file");
    Index rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "# rows=%td cols=%td", &rows, &cols) != 2)
        fail(path, "missing '# rows=R cols=C' header");
    if (rows < 0 || cols < 0) fail(path, "negative dimensions");
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) fail(path, "fewer rows than the header promises");
        std::stringstream ss(line);
        std::string cell;
        for (Index j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ',')) fail(path, "short row");
            m(i, j) = std::strtod(cell.c_str(), nullptr);
        }
    }
    return m;
}

void write_matrix_binary(const std::filesystem::path& path, const MatrixXd& m) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kMagic, 4);
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const double x = m(i, j);
            out.write(reinterpret_cast<const char*>(&x), 8);
        }
}

MatrixXd read_matrix_binary(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(path, "bad magic (expected GCMB)");
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in) fail(path, "truncated header");
    MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            double x = 0.0;
            in.read(reinterpret_cast<char*>(&x), 8);
            if (!in) fail(path, "truncated data");
            m(i, j) = x;
        }
    return m;
}

MatrixXd read_matrix_auto(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return read_matrix_binary(path);
    return read_matrix_csv(path);
}

void write_spectral_model_csv(const std::filesystem::path& path, const SpectralModel& model) {
    model.validate();
    auto out = open_out(path, std::ios::out);
    out << "# rho=" << format_double(model.rho) << " gamma=" << format_double(model.gamma)
        << " d=" << model.d() << "\n";
    out << "omega,teacher_projection\n";
    for (Index i = 0; i < model.d(); ++i)
        out << format_double(model.eigenvalues(i)) << ','
            << format_double(model.teacher_projection(i)) << '\n';
}

SpectralModel read_spectral_model_csv(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in);
    std::string line;
    if (!std::getline(in, line)) fail(path, "empty file");
    SpectralModel model;
    Index d = 0;
    if (std::sscanf(line.c_str(), "# rho=%lf gamma=%lf d=%td", &model.rho, &model.gamma, &d) != 3)
        fail(path, "missing '# rho=.. gamma=.. d=..' metadata line");
    if (!std::getline(in, line) || line != "omega,teacher_projection")
        fail(path, "missing 'omega,teacher_projection' header");
    model.eigenvalues.resize(d);
    model.teacher_projection.resize(d);
    for (Index i = 0; i < d; ++i) {
        if (!std::getline(in, line)) fail(path, "fewer rows than d");
        double w = 0.0, t = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &w, &t) != 2) fail(path, "bad row");
        model.eigenvalues(i) = w;
        model.teacher_projection(i) = t;
    }
    model.validate();
    return model;
}

namespace {

std::filesystem::path find_component(const std::filesystem::path& dir, const std::string& stem) {
    for (const char* ext : {".csv", ".bin"}) {
        const auto candidate = dir / (stem + ext);
        if (std::filesystem::exists(candidate)) return candidate;
    }
    fail(dir, "missing component " + stem + " (.csv or .bin)");
}

}  // namespace

CovarianceTriple read_covariance_triple(const std::filesystem::path& dir) {
    CovarianceTriple triple;
    triple.psi = read_matrix_auto(find_component(dir, "psi"));
    triple.phi = read_matrix_auto(find_component(dir, "phi"));
    triple.omega = read_matrix_auto(find_component(dir, "omega"));
    const MatrixXd theta = read_matrix_auto(find_component(dir, "theta0"));
    if (theta.cols() != 1) fail(dir / "theta0", "theta0 must be a column vector");
    triple.theta0 = theta.col(0);
    triple.validate();
    return triple;
}

void write_covariance_triple(const std::filesystem::path& dir, const CovarianceTriple& triple) {
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "psi.csv", triple.psi);
    write_matrix_csv(dir / "phi.csv", triple.phi);
    write_matrix_csv(dir / "omega.csv", triple.omega);
    write_matrix_csv(dir / "theta0.csv", triple.theta0);
}

void write_learning_curve_csv(const std::filesystem::path& path, const LearningCurve& curve,
                              const std::string& metadata_json_line) {
    auto out = open_out(path, std::ios::out);
    if (!metadata_json_line.empty()) out << "# " << metadata_json_line << "\n";
    out << curve.sweep_variable << ",e_gen,e_train,V,q,m,converged,iterations\n";
    for (const auto& r : curve.rows) {
        out << format_double(r.x) << ',' << format_double(r.e_gen) << ','
            << format_double(r.e_train) << ',' << format_double(r.v) << ',' << format_double(r.q)
            << ',' << format_double(r.m) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations
            << '\n';
    }
}

}  // namespace gcm
