#include "arnagg/arnoldi.hpp"

#include <string>

namespace arnagg {

DenseMatrix ArnoldiFactorization::basis_matrix() const {
  DenseMatrix Q(size(), n());
  for (Index i = 0; i < size(); ++i) Q.row(i) = basis[static_cast<std::size_t>(i)].transpose();
  return Q;
}

ArnoldiProcess::ArnoldiProcess(const StochasticMatrix& P, const Eigen::Ref<const Vector>& p0,
                               Index capacity, OrthMethod method, double deflation_tol)
    : P_(P), method_(method), deflation_tol_(deflation_tol), capacity_(capacity) {
  if (p0.size() != P.n()) throw DimensionMismatch(P.n(), p0.size(), "initial vector");
  if (capacity < 1 || capacity > P.n())
    throw InvalidArgument("aggregation size " + std::to_string(capacity) + " outside [1, " +
                          std::to_string(P.n()) + "]");
  if (!(deflation_tol >= 0.0)) throw InvalidArgument("deflation tolerance must be nonnegative");
  const double norm = p0.norm();
  if (!(norm > 0.0)) throw ZeroInitialVector();

  basis_.reserve(static_cast<std::size_t>(capacity));
  H_ = DenseMatrix::Zero(capacity, capacity + 1);
  next_ = p0 / norm;
  h_.resize(capacity);
  scratch_.resize(capacity);
}

void ArnoldiProcess::expand() {
  if (!can_expand()) throw InvalidArgument("Arnoldi process cannot expand further");
  const Index j = size();
  basis_.push_back(next_);

  // next_ becomes w = q_j^T P and is then orthogonalized in place.
  P_.left_multiply(basis_.back(), next_);
  const double w_norm = next_.norm();
  const std::span<const Vector> span(basis_.data(), basis_.size());
  const double r_norm = orthogonalize_in_place(next_, span, method_, h_, scratch_);

  H_.row(j).head(j + 1) = h_.head(j + 1).transpose();
  H_(j, j + 1) = r_norm;
  if (r_norm <= deflation_tol_ * w_norm) {
    deflated_ = true;
    return;
  }
  next_ /= r_norm;
}

ArnoldiFactorization ArnoldiProcess::snapshot() const {
  ArnoldiFactorization f;
  const Index j = size();
  f.basis = basis_;
  f.H = H_.topLeftCorner(j, j);
  f.residual_norm = residual_norm();
  f.deflated = deflated_;
  if (!deflated_ && j > 0) f.residual_direction = next_;
  return f;
}

ArnoldiFactorization arnoldi_iterate(const StochasticMatrix& P, const Distribution& p0, Index m,
                                     OrthMethod method, double deflation_tol) {
  ArnoldiProcess process(P, p0.values(), m, method, deflation_tol);
  while (process.can_expand()) process.expand();
  return process.snapshot();
}

Aggregation build_aggregation(const ArnoldiFactorization& f, const Distribution& p0) {
  if (p0.size() != f.n()) throw DimensionMismatch(f.n(), p0.size(), "initial vector");
  Aggregation agg;
  agg.Pi = f.H;
  agg.A = f.basis_matrix();
  agg.pi0 = Vector::Zero(f.size());
  if (f.size() > 0) agg.pi0[0] = p0.values().norm();
  return agg;
}

DenseMatrix basis_times(const std::vector<Vector>& basis, const StochasticMatrix& P) {
  DenseMatrix QP(static_cast<Index>(basis.size()), P.n());
  Vector row(P.n());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    P.left_multiply(basis[i], row);
    QP.row(static_cast<Index>(i)) = row.transpose();
  }
  return QP;
}

double relation_residual(const ArnoldiFactorization& f, const StochasticMatrix& P) {
  if (f.size() == 0) return 0.0;
  if (f.n() != P.n()) throw DimensionMismatch(P.n(), f.n(), "factorization basis");
  DenseMatrix D = f.H * f.basis_matrix() - basis_times(f.basis, P);
  if (f.residual_direction)
    D.row(f.size() - 1) += f.residual_norm * f.residual_direction->transpose();
  return inf_norm(D);
}

}  // namespace arnagg
