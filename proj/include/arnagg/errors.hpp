#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arnagg {

/// Base of every error raised by the library.
///
/// Errors fall into two families: invalid input or configuration
/// (ValidationError) and numerical breakdown of an otherwise valid run
/// (NumericalError). The CLI maps them to exit codes 2 and 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& what)
      : ValidationError(what + ": expected dimension " + std::to_string(expected) + ", got " +
                        std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class EmptyInput : public ValidationError {
 public:
  explicit EmptyInput(const std::string& what) : ValidationError(what + ": empty input") {}
};

class InvalidArgument : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RowSumViolation : public ValidationError {
 public:
  RowSumViolation(std::size_t row, double sum)
      : ValidationError("row " + std::to_string(row) + " sums to " + std::to_string(sum)),
        row_(row),
        sum_(sum) {}
  std::size_t row() const noexcept { return row_; }
  double sum() const noexcept { return sum_; }

 private:
  std::size_t row_;
  double sum_;
};

class NegativeEntry : public ValidationError {
 public:
  NegativeEntry(std::size_t row, std::size_t col, double value)
      : ValidationError("negative entry " + std::to_string(value) + " at (" + std::to_string(row) +
                        ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class GammaTooSmall : public ValidationError {
 public:
  GammaTooSmall(double gamma, double required)
      : ValidationError("uniformization rate " + std::to_string(gamma) +
                        " is below the largest exit rate " + std::to_string(required)) {}
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroInitialVector : public ValidationError {
 public:
  ZeroInitialVector() : ValidationError("initial vector has zero 2-norm") {}
};

class MissingStationary : public ValidationError {
 public:
  MissingStationary() : ValidationError("aggregation carries no aggregated stationary vector") {}
};

class InvalidCoupling : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EpsilonOutOfRange : public ValidationError {
 public:
  explicit EpsilonOutOfRange(double eps)
      : ValidationError("epsilon " + std::to_string(eps) + " outside (0, 1)") {}
};

class RankDeficient : public NumericalError {
 public:
  explicit RankDeficient(std::size_t index)
      : NumericalError("input vector " + std::to_string(index) +
                       " is numerically dependent on its predecessors"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ZeroVector : public NumericalError {
 public:
  ZeroVector() : NumericalError("cannot normalize a vector with zero 1-norm") {}
};

class NoConvergence : public NumericalError {
 public:
  explicit NoConvergence(std::size_t max_sweeps)
      : NumericalError("QR iteration did not converge within " + std::to_string(max_sweeps) +
                       " sweeps"),
        max_sweeps_(max_sweeps) {}
  std::size_t max_sweeps() const noexcept { return max_sweeps_; }

 private:
  std::size_t max_sweeps_;
};

class ComplexStationary : public NumericalError {
 public:
  explicit ComplexStationary(double imag)
      : NumericalError("selected stationary eigenvector has imaginary part " +
                       std::to_string(imag)),
        imag_(imag) {}
  double imaginary_part() const noexcept { return imag_; }

 private:
  double imag_;
};

}  // namespace arnagg
