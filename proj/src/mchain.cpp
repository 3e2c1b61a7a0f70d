#include "arnagg/mchain.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace arnagg {

MatrixStorage::MatrixStorage(RowMajorMatrix dense) : data_(std::move(dense)) {}

MatrixStorage::MatrixStorage(SparseMatrix sparse) : data_(std::move(sparse)) {
  std::get<SparseMatrix>(data_).makeCompressed();
}

Index MatrixStorage::rows() const noexcept {
  return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, data_);
}

Index MatrixStorage::cols() const noexcept {
  return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, data_);
}

DenseMatrix MatrixStorage::to_dense() const {
  if (const auto* d = std::get_if<RowMajorMatrix>(&data_)) return DenseMatrix(*d);
  return DenseMatrix(std::get<SparseMatrix>(data_));
}

SparseMatrix MatrixStorage::to_sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return *s;
  SparseMatrix s = std::get<RowMajorMatrix>(data_).sparseView();
  s.makeCompressed();
  return s;
}

void MatrixStorage::left_multiply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> y) const {
  if (x.size() != rows()) throw DimensionMismatch(rows(), x.size(), "left_multiply input");
  if (y.size() != cols()) throw DimensionMismatch(cols(), y.size(), "left_multiply output");
  if (const auto* d = std::get_if<RowMajorMatrix>(&data_)) {
    y.noalias() = d->transpose() * x;
  } else {
    y.noalias() = std::get<SparseMatrix>(data_).transpose() * x;
  }
}

Distribution Distribution::strict(Vector values) {
  if (values.size() == 0) throw EmptyInput("distribution");
  for (Index i = 0; i < values.size(); ++i) {
    if (!(values[i] >= -1e-12))
      throw InvalidArgument("distribution entry " + std::to_string(i) + " is negative: " +
                            std::to_string(values[i]));
  }
  const double sum = values.sum();
  if (!(std::abs(sum - 1.0) <= 1e-10))
    throw InvalidArgument("distribution sums to " + std::to_string(sum) + ", not 1");
  return Distribution(std::move(values), true);
}

StochasticMatrix validate_stochastic(MatrixStorage M, double tol) {
  if (M.rows() != M.cols())
    throw ShapeError("transition matrix must be square, got " + std::to_string(M.rows()) + "x" +
                     std::to_string(M.cols()));
  if (M.rows() == 0) throw EmptyInput("transition matrix");

  std::vector<double> row_sums(static_cast<std::size_t>(M.rows()), 0.0);
  M.transform_entries([&](Index i, Index j, double v) {
    if (!(v >= -tol)) throw NegativeEntry(i, j, v);
    const double clamped = v < 0.0 ? 0.0 : v;
    row_sums[static_cast<std::size_t>(i)] += clamped;
    return clamped;
  });
  for (std::size_t i = 0; i < row_sums.size(); ++i) {
    if (!(std::abs(row_sums[i] - 1.0) <= tol)) throw RowSumViolation(i, row_sums[i]);
  }
  return StochasticMatrix(std::move(M));
}

StochasticMatrix validate_stochastic(const DenseMatrix& M, double tol) {
  return validate_stochastic(MatrixStorage(RowMajorMatrix(M)), tol);
}

StochasticMatrix validate_stochastic(const SparseMatrix& M, double tol) {
  return validate_stochastic(MatrixStorage(M), tol);
}

GeneratorMatrix validate_generator(MatrixStorage Q, double tol) {
  if (Q.rows() != Q.cols())
    throw ShapeError("generator matrix must be square, got " + std::to_string(Q.rows()) + "x" +
                     std::to_string(Q.cols()));
  if (Q.rows() == 0) throw EmptyInput("generator matrix");

  std::vector<double> row_sums(static_cast<std::size_t>(Q.rows()), 0.0);
  Q.for_each_entry([&](Index i, Index j, double v) {
    if (i != j && !(v >= 0.0)) throw NegativeEntry(i, j, v);
    row_sums[static_cast<std::size_t>(i)] += v;
  });
  for (std::size_t i = 0; i < row_sums.size(); ++i) {
    if (!(std::abs(row_sums[i]) <= tol)) throw RowSumViolation(i, row_sums[i]);
  }
  return GeneratorMatrix(std::move(Q));
}

GeneratorMatrix validate_generator(const DenseMatrix& Q, double tol) {
  return validate_generator(MatrixStorage(RowMajorMatrix(Q)), tol);
}

StochasticMatrix uniformize(const GeneratorMatrix& Q, std::optional<double> gamma) {
  const Index n = Q.n();
  double max_exit = 0.0;
  std::vector<double> off_diagonal(static_cast<std::size_t>(n), 0.0);
  Q.storage().for_each_entry([&](Index i, Index j, double v) {
    if (i == j)
      max_exit = std::max(max_exit, std::abs(v));
    else
      off_diagonal[static_cast<std::size_t>(i)] += v;
  });

  double rate = max_exit > 0.0 ? max_exit : 1.0;
  if (gamma) {
    if (!(*gamma > 0.0) || *gamma < max_exit) throw GammaTooSmall(*gamma, max_exit);
    rate = *gamma;
  }

  // The diagonal is rebuilt from the off-diagonal mass so that the generator's
  // row-sum noise does not leak into the stochastic row sums.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n));
  Q.storage().for_each_entry([&](Index i, Index j, double v) {
    if (i != j && v != 0.0) triplets.emplace_back(i, j, v / rate);
  });
  for (Index i = 0; i < n; ++i)
    triplets.emplace_back(i, i, 1.0 - off_diagonal[static_cast<std::size_t>(i)] / rate);

  SparseMatrix P(n, n);
  P.setFromTriplets(triplets.begin(), triplets.end());
  if (Q.storage().is_sparse()) return validate_stochastic(MatrixStorage(std::move(P)));
  return validate_stochastic(MatrixStorage(RowMajorMatrix(DenseMatrix(P))));
}

Distribution transient(const StochasticMatrix& P, const Distribution& p0, std::size_t k) {
  if (p0.size() != P.n()) throw DimensionMismatch(P.n(), p0.size(), "transient initial vector");
  Vector current = p0.values();
  Vector next(current.size());
  for (std::size_t step = 0; step < k; ++step) {
    P.left_multiply(current, next);
    current.swap(next);
  }
  return p0.is_strict() ? Distribution::strict(std::move(current))
                        : Distribution::approximate(std::move(current));
}

double inf_norm(const Eigen::Ref<const DenseMatrix>& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const MatrixStorage& M) {
  std::vector<double> sums(static_cast<std::size_t>(M.rows()), 0.0);
  M.for_each_entry(
      [&](Index i, Index, double v) { sums[static_cast<std::size_t>(i)] += std::abs(v); });
  double best = 0.0;
  for (double s : sums) best = std::max(best, s);
  return best;
}

Vector abs_row_sums(const Eigen::Ref<const DenseMatrix>& M) {
  return M.cwiseAbs().rowwise().sum();
}

double weighted_abs_row_sums(const Eigen::Ref<const Vector>& v,
                             const Eigen::Ref<const DenseMatrix>& M) {
  if (v.size() != M.rows()) throw DimensionMismatch(M.rows(), v.size(), "weighted_abs_row_sums");
  return v.cwiseAbs().dot(abs_row_sums(M));
}

}  // namespace arnagg
