#pragma once

#include <optional>
#include <vector>

#include "arnagg/mchain.hpp"
#include "arnagg/orthonorm.hpp"

namespace arnagg {

inline constexpr double kDefaultDeflationTolerance = 1e-12;

/// Result of j Arnoldi steps in row convention:
///   H Q + e_j h_{j,j+1} q_{j+1}^T = Q P
/// where the rows of Q are the basis vectors and H(i, l) = 0 for l > i + 1.
struct ArnoldiFactorization {
  std::vector<Vector> basis;                // q_1..q_j, each of length n
  DenseMatrix H;                            // j x j
  double residual_norm = 0.0;               // h_{j,j+1}
  std::optional<Vector> residual_direction; // q_{j+1}; absent when deflated
  bool deflated = false;

  Index size() const noexcept { return static_cast<Index>(basis.size()); }
  Index n() const noexcept { return basis.empty() ? 0 : basis.front().size(); }
  /// Q_j as a dense j x n matrix.
  DenseMatrix basis_matrix() const;
};

/// Incremental Arnoldi iteration. Each expand() adds one basis vector and one
/// row of H, so callers can inspect the factorization at every size.
class ArnoldiProcess {
 public:
  /// Throws ZeroInitialVector, DimensionMismatch, or InvalidArgument when
  /// capacity is outside [1, n].
  ArnoldiProcess(const StochasticMatrix& P, const Eigen::Ref<const Vector>& p0, Index capacity,
                 OrthMethod method = {}, double deflation_tol = kDefaultDeflationTolerance);

  bool can_expand() const noexcept { return !deflated_ && size() < capacity_; }
  /// Requires can_expand().
  void expand();

  Index size() const noexcept { return static_cast<Index>(basis_.size()); }
  Index capacity() const noexcept { return capacity_; }
  bool deflated() const noexcept { return deflated_; }
  double residual_norm() const noexcept { return size() == 0 ? 0.0 : H_(size() - 1, size()); }

  ArnoldiFactorization snapshot() const;

 private:
  const StochasticMatrix& P_;
  OrthMethod method_;
  double deflation_tol_;
  Index capacity_;
  std::vector<Vector> basis_;
  DenseMatrix H_;  // capacity x (capacity + 1), row i holds the coefficients of q_i^T P
  Vector next_;    // q_{j+1} once the current row is finished
  Vector h_, scratch_;
  bool deflated_ = false;
};

/// Runs up to m steps; stops early when the residual drops to
/// deflation_tol * ||q_j^T P||_2.
ArnoldiFactorization arnoldi_iterate(const StochasticMatrix& P, const Distribution& p0, Index m,
                                     OrthMethod method = {},
                                     double deflation_tol = kDefaultDeflationTolerance);

/// Aggregated step matrix, disaggregation matrix, aggregated initial vector.
struct Aggregation {
  DenseMatrix Pi;                     // m x m
  DenseMatrix A;                      // m x n
  Vector pi0;                         // length m
  std::optional<Vector> pi_stationary;

  Index size() const noexcept { return Pi.rows(); }
  Index n() const noexcept { return A.cols(); }
};

/// Pi = H_j, A = Q_j, pi0 = (||p0||_2, 0, ..., 0).
Aggregation build_aggregation(const ArnoldiFactorization& f, const Distribution& p0);

/// ||H Q + E - Q P||_inf with E carrying the residual in its last row.
double relation_residual(const ArnoldiFactorization& f, const StochasticMatrix& P);

/// Q_j P as a dense j x n matrix, one left product per basis row.
DenseMatrix basis_times(const std::vector<Vector>& basis, const StochasticMatrix& P);

}  // namespace arnagg
