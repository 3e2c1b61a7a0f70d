#pragma once

#include <cstddef>
#include <optional>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "arnagg/errors.hpp"

namespace arnagg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kStochasticTolerance = 1e-12;
inline constexpr double kGeneratorTolerance = 1e-10;

/// Square matrix held either dense (row-major) or in compressed-row form.
///
/// All products follow the row-vector convention: `left_multiply(x, y)`
/// computes y^T = x^T M.
class MatrixStorage {
 public:
  explicit MatrixStorage(RowMajorMatrix dense);
  explicit MatrixStorage(SparseMatrix sparse);

  Index rows() const noexcept;
  Index cols() const noexcept;
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(data_); }

  const RowMajorMatrix& dense() const { return std::get<RowMajorMatrix>(data_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(data_); }

  DenseMatrix to_dense() const;
  SparseMatrix to_sparse() const;

  /// y^T = x^T M. `y` must not alias `x`.
  void left_multiply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> y) const;

  /// Calls f(row, col, value) for every stored entry, row by row.
  template <class F>
  void for_each_entry(F&& f) const {
    if (const auto* d = std::get_if<RowMajorMatrix>(&data_)) {
      for (Index i = 0; i < d->rows(); ++i)
        for (Index j = 0; j < d->cols(); ++j) f(i, j, (*d)(i, j));
    } else {
      const auto& s = std::get<SparseMatrix>(data_);
      for (Index i = 0; i < s.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(s, i); it; ++it) f(i, it.col(), it.value());
    }
  }

  /// Mutable access for in-place clamping during validation.
  template <class F>
  void transform_entries(F&& f) {
    if (auto* d = std::get_if<RowMajorMatrix>(&data_)) {
      for (Index i = 0; i < d->rows(); ++i)
        for (Index j = 0; j < d->cols(); ++j) (*d)(i, j) = f(i, j, (*d)(i, j));
    } else {
      auto& s = std::get<SparseMatrix>(data_);
      for (Index i = 0; i < s.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(s, i); it; ++it)
          it.valueRef() = f(i, it.col(), it.value());
    }
  }

 private:
  std::variant<RowMajorMatrix, SparseMatrix> data_;
};

/// Row-stochastic transition matrix. Only obtainable through validation.
class StochasticMatrix {
 public:
  Index n() const noexcept { return storage_.rows(); }
  const MatrixStorage& storage() const noexcept { return storage_; }
  bool is_sparse() const noexcept { return storage_.is_sparse(); }
  DenseMatrix to_dense() const { return storage_.to_dense(); }
  void left_multiply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> y) const {
    storage_.left_multiply(x, y);
  }

 private:
  explicit StochasticMatrix(MatrixStorage storage) : storage_(std::move(storage)) {}
  friend StochasticMatrix validate_stochastic(MatrixStorage, double);

  MatrixStorage storage_;
};

/// CTMC rate matrix: nonnegative off-diagonals, zero row sums.
class GeneratorMatrix {
 public:
  Index n() const noexcept { return storage_.rows(); }
  const MatrixStorage& storage() const noexcept { return storage_; }
  DenseMatrix to_dense() const { return storage_.to_dense(); }

 private:
  explicit GeneratorMatrix(MatrixStorage storage) : storage_(std::move(storage)) {}
  friend GeneratorMatrix validate_generator(MatrixStorage, double);

  MatrixStorage storage_;
};

/// Probability mass per state. Approximated transient distributions use the
/// same type with `strict` off; those may carry negative mass.
class Distribution {
 public:
  /// Throws InvalidArgument unless entries >= -1e-12 and the sum is 1 +- 1e-10.
  static Distribution strict(Vector values);
  static Distribution approximate(Vector values) { return Distribution(std::move(values), false); }

  const Vector& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  bool is_strict() const noexcept { return strict_; }

 private:
  Distribution(Vector values, bool strict) : values_(std::move(values)), strict_(strict) {}

  Vector values_;
  bool strict_;
};

/// Checks row sums and signs; entries in (-tol, 0) are clamped to zero.
/// Throws RowSumViolation, NegativeEntry or ShapeError.
StochasticMatrix validate_stochastic(MatrixStorage M, double tol = kStochasticTolerance);
StochasticMatrix validate_stochastic(const DenseMatrix& M, double tol = kStochasticTolerance);
StochasticMatrix validate_stochastic(const SparseMatrix& M, double tol = kStochasticTolerance);

GeneratorMatrix validate_generator(MatrixStorage Q, double tol = kGeneratorTolerance);
GeneratorMatrix validate_generator(const DenseMatrix& Q, double tol = kGeneratorTolerance);

/// P = I + Q / gamma. Without `gamma` the largest exit rate is used (1 for Q = 0).
/// Sparse generators yield sparse transition matrices.
StochasticMatrix uniformize(const GeneratorMatrix& Q, std::optional<double> gamma = std::nullopt);

/// p_k^T = p_0^T P^k by k successive vector-matrix products.
Distribution transient(const StochasticMatrix& P, const Distribution& p0, std::size_t k);

/// Maximum absolute row sum.
double inf_norm(const Eigen::Ref<const DenseMatrix>& M);
double inf_norm(const MatrixStorage& M);

/// |M| * 1 as a vector.
Vector abs_row_sums(const Eigen::Ref<const DenseMatrix>& M);

/// <|v|, |M| 1>. Bounded below by ||v^T M||_1 and above by ||v||_1 ||M||_inf.
double weighted_abs_row_sums(const Eigen::Ref<const Vector>& v,
                             const Eigen::Ref<const DenseMatrix>& M);

}  // namespace arnagg
