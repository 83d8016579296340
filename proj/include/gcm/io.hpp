#pragma once

#include "gcm/types.hpp"

#include <filesystem>
#include <string>

namespace gcm {

// Locale-independent, full-precision decimal formatting ("%.17g").
std::string format_double(double x);

// CSV matrix format: first line "# rows=<r> cols=<c>", then one
// comma-separated row per line.
void write_matrix_csv(const std::filesystem::path& path, const MatrixXd& m);
MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Binary matrix format: magic "GCMB", then rows and cols as uint64, then
// row-major float64, all little-endian.
void write_matrix_binary(const std::filesystem::path& path, const MatrixXd& m);
MatrixXd read_matrix_binary(const std::filesystem::path& path);

// Dispatches on the magic bytes / extension.
MatrixXd read_matrix_auto(const std::filesystem::path& path);

// SpectralModel CSV: "# rho=<v> gamma=<v> d=<n>" metadata line, then the
// header "omega,teacher_projection" and one row per direction.
void write_spectral_model_csv(const std::filesystem::path& path, const SpectralModel& model);
SpectralModel read_spectral_model_csv(const std::filesystem::path& path);

// Covariance bundle: a directory holding psi, phi, omega, theta0 as matrix
// files (either .csv or .bin as above); theta0 is a column vector.
CovarianceTriple read_covariance_triple(const std::filesystem::path& dir);
void write_covariance_triple(const std::filesystem::path& dir, const CovarianceTriple& triple);

// Learning-curve CSV with a fixed column order. Any metadata lines are
// written as leading "# " comments.
void write_learning_curve_csv(const std::filesystem::path& path, const LearningCurve& curve,
                              const std::string& metadata_json_line);

}  // namespace gcm
