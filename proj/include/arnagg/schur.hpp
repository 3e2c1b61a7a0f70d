#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include "arnagg/arnoldi.hpp"

namespace arnagg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kSchurTolerance = 1e-12;
inline constexpr double kImaginaryTolerance = 1e-8;

struct QRPair {
  ComplexMatrix Q;  // orthonormal columns
  ComplexMatrix R;  // upper triangular, real nonnegative diagonal
};

/// Gram-Schmidt with one reorthogonalization pass on the columns of M.
/// Throws RankDeficient(col) for a numerically dependent column.
QRPair qr_decompose(const ComplexMatrix& M);
QRPair qr_decompose(const DenseMatrix& M);

/// M = U T U^H with T upper triangular. The diagonal of T is sorted by
/// descending real part, then ascending |imag|, then original position.
struct SchurDecomposition {
  ComplexMatrix U;
  ComplexMatrix T;
  ComplexVector eigenvalues;

  Index n() const noexcept { return T.rows(); }
};

/// Householder reduction to Hessenberg form followed by Wilkinson-shifted
/// complex QR sweeps. max_sweeps defaults to 30 n in total.
/// Throws NoConvergence, ShapeError for non-square input.
SchurDecomposition schur_decompose(const DenseMatrix& M,
                                   std::optional<std::size_t> max_sweeps = std::nullopt,
                                   double tol = kSchurTolerance);

struct Eigenpair {
  Complex lambda;
  ComplexVector v;  // unit 2-norm, M v = lambda v
};

/// Eigenpair whose eigenvalue has real part closest to one (then smallest
/// |imag|). Reads the first Schur vector when that eigenvalue leads the sorted
/// diagonal and back-substitutes on T otherwise.
Eigenpair leading_eigvec(const SchurDecomposition& S);

/// Sets agg.pi_stationary to the left eigenvector of Pi selected by
/// leading_eigvec, scaled so ||pi^T A||_1 = 1 and sum(pi^T A) >= 0.
/// Throws ComplexStationary if the phase-aligned vector keeps an imaginary
/// part above 1e-8.
Aggregation aggregated_stationary(Aggregation agg);

}  // namespace arnagg
