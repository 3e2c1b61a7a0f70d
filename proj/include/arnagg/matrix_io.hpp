#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "arnagg/mchain.hpp"

namespace arnagg {

enum class MatrixFormat {
  MatrixMarket,  // %%MatrixMarket matrix coordinate real general, 1-based
  DenseCsv,      // one row per line
};

/// `.mtx` selects Matrix Market, anything else dense CSV.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Shortest text that round-trips: 17 significant digits.
std::string format_real(double value);

MatrixStorage read_matrix_market(std::istream& in);
MatrixStorage read_dense_csv(std::istream& in);
void write_matrix_market(const MatrixStorage& M, std::ostream& out);
void write_dense_csv(const MatrixStorage& M, std::ostream& out);

MatrixStorage load_matrix(const std::filesystem::path& path, MatrixFormat format);
MatrixStorage load_matrix(const std::filesystem::path& path);
void save_matrix(const MatrixStorage& M, const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const MatrixStorage& M, const std::filesystem::path& path);

StochasticMatrix load_stochastic(const std::filesystem::path& path,
                                 double tol = kStochasticTolerance);
GeneratorMatrix load_generator(const std::filesystem::path& path,
                               double tol = kGeneratorTolerance);

/// Single-column CSV, one value per line.
Vector read_vector_csv(std::istream& in);
void write_vector_csv(const Eigen::Ref<const Vector>& v, std::ostream& out);
Vector load_vector(const std::filesystem::path& path);
void save_vector(const Eigen::Ref<const Vector>& v, const std::filesystem::path& path);

}  // namespace arnagg
