#include "arnagg/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace arnagg {
namespace {

// Unitary rotation G = [c, s; -conj(s), c] with G (f, g)^T = (r, 0)^T.
struct Givens {
  double c = 1.0;
  Complex s = 0.0;

  static Givens zeroing(Complex f, Complex g) {
    Givens G;
    if (g == Complex(0.0)) return G;
    if (f == Complex(0.0)) {
      G.c = 0.0;
      G.s = std::conj(g) / std::abs(g);
      return G;
    }
    const double nf = std::abs(f);
    const double norm = std::hypot(nf, std::abs(g));
    G.c = nf / norm;
    G.s = (f / nf) * std::conj(g) / norm;
    return G;
  }

  // rows k, k+1 <- G * rows, over columns [c0, c1)
  void apply_rows(ComplexMatrix& A, Index k, Index c0, Index c1) const {
    for (Index j = c0; j < c1; ++j) {
      const Complex x = A(k, j), y = A(k + 1, j);
      A(k, j) = c * x + s * y;
      A(k + 1, j) = -std::conj(s) * x + c * y;
    }
  }

  // columns k, k+1 <- columns * G^H, over rows [r0, r1)
  void apply_cols(ComplexMatrix& A, Index k, Index r0, Index r1) const {
    for (Index i = r0; i < r1; ++i) {
      const Complex x = A(i, k), y = A(i, k + 1);
      A(i, k) = c * x + std::conj(s) * y;
      A(i, k + 1) = -s * x + c * y;
    }
  }
};

void reduce_to_hessenberg(ComplexMatrix& A, ComplexMatrix& U) {
  const Index n = A.rows();
  for (Index k = 0; k + 2 < n; ++k) {
    const Index m = n - k - 1;
    ComplexVector v = A.col(k).segment(k + 1, m);
    if (v.tail(m - 1).norm() == 0.0) continue;
    const double norm = v.norm();
    const Complex phase = v[0] == Complex(0.0) ? Complex(1.0) : v[0] / std::abs(v[0]);
    v[0] += phase * norm;
    v.normalize();

    // A <- H A H, U <- U H with H = I - 2 v v^H
    auto rows = A.bottomRows(m);
    const Eigen::RowVectorXcd vr = v.adjoint() * rows;
    rows.noalias() -= 2.0 * v * vr;
    auto cols = A.rightCols(m);
    const ComplexVector cv = cols * v;
    cols.noalias() -= 2.0 * cv * v.adjoint();
    auto ucols = U.rightCols(m);
    const ComplexVector uv = ucols * v;
    ucols.noalias() -= 2.0 * uv * v.adjoint();
    A.col(k).tail(m - 1).setZero();
  }
}

Complex wilkinson_shift(const ComplexMatrix& A, Index hi) {
  const Complex a = A(hi - 1, hi - 1), b = A(hi - 1, hi), c = A(hi, hi - 1), d = A(hi, hi);
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex mid = 0.5 * (a + d);
  const Complex l1 = mid + disc, l2 = mid - disc;
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

void qr_iterate(ComplexMatrix& A, ComplexMatrix& U, std::size_t max_sweeps, double tol) {
  const Index n = A.rows();
  const double anorm = std::max(A.cwiseAbs().rowwise().sum().maxCoeff(),
                                std::numeric_limits<double>::min());
  std::vector<Givens> rotations(static_cast<std::size_t>(std::max<Index>(n - 1, 0)));
  std::size_t sweeps = 0;
  int since_deflation = 0;
  Index hi = n - 1;
  while (hi > 0) {
    Index lo = hi;
    while (lo > 0) {
      double scale = std::abs(A(lo - 1, lo - 1)) + std::abs(A(lo, lo));
      if (scale == 0.0) scale = anorm;
      if (std::abs(A(lo, lo - 1)) <= tol * scale) {
        A(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++sweeps > max_sweeps) throw NoConvergence(max_sweeps);
    ++since_deflation;

    Complex mu = wilkinson_shift(A, hi);
    if (since_deflation % 11 == 10) {
      // Exceptional shift to break cycles of the Wilkinson shift.
      mu = A(hi, hi) + 0.75 * std::abs(A(hi, hi - 1));
    }

    for (Index k = lo; k <= hi; ++k) A(k, k) -= mu;
    for (Index k = lo; k < hi; ++k) {
      Givens& G = rotations[static_cast<std::size_t>(k)];
      G = Givens::zeroing(A(k, k), A(k + 1, k));
      G.apply_rows(A, k, k, n);
      A(k + 1, k) = 0.0;
    }
    for (Index k = lo; k < hi; ++k) {
      const Givens& G = rotations[static_cast<std::size_t>(k)];
      G.apply_cols(A, k, 0, k + 2);
      G.apply_cols(U, k, 0, n);
    }
    for (Index k = lo; k <= hi; ++k) A(k, k) += mu;
  }
}

bool precedes(Complex a, Index ia, Complex b, Index ib) {
  constexpr double tie = 1e-12;
  if (a.real() > b.real() + tie) return true;
  if (b.real() > a.real() + tie) return false;
  const double ima = std::abs(a.imag()), imb = std::abs(b.imag());
  if (ima < imb - tie) return true;
  if (imb < ima - tie) return false;
  return ia < ib;
}

// Exchanges the diagonal entries k and k+1 of triangular T by a unitary
// similarity, keeping M = U T U^H.
void swap_adjacent(ComplexMatrix& T, ComplexMatrix& U, Index k) {
  const Index n = T.rows();
  const Complex a = T(k, k), c = T(k + 1, k + 1);
  // (b, c - a) spans the eigenvector for c in the leading 2x2 block.
  Complex x1 = T(k, k + 1), x2 = c - a;
  double norm = std::hypot(std::abs(x1), std::abs(x2));
  if (norm == 0.0) {
    x1 = 0.0;
    x2 = 1.0;
    norm = 1.0;
  }
  x1 /= norm;
  x2 /= norm;
  // Q = [x1, -conj(x2); x2, conj(x1)]; T <- Q^H T Q, U <- U Q.
  for (Index j = 0; j < n; ++j) {
    const Complex p = T(k, j), q = T(k + 1, j);
    T(k, j) = std::conj(x1) * p + std::conj(x2) * q;
    T(k + 1, j) = -x2 * p + x1 * q;
  }
  for (Index i = 0; i < n; ++i) {
    const Complex p = T(i, k), q = T(i, k + 1);
    T(i, k) = x1 * p + x2 * q;
    T(i, k + 1) = -std::conj(x2) * p + std::conj(x1) * q;
  }
  for (Index i = 0; i < n; ++i) {
    const Complex p = U(i, k), q = U(i, k + 1);
    U(i, k) = x1 * p + x2 * q;
    U(i, k + 1) = -std::conj(x2) * p + std::conj(x1) * q;
  }
  T(k + 1, k) = 0.0;
  T(k, k) = c;
  T(k + 1, k + 1) = a;
}

void sort_schur(ComplexMatrix& T, ComplexMatrix& U) {
  const Index n = T.rows();
  std::vector<Index> origin(static_cast<std::size_t>(n));
  std::iota(origin.begin(), origin.end(), Index{0});
  // Bubble sort: only adjacent exchanges are available as similarity moves.
  for (Index pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (Index k = 0; k + 1 < n - pass; ++k) {
      const auto ok = static_cast<std::size_t>(k);
      if (precedes(T(k + 1, k + 1), origin[ok + 1], T(k, k), origin[ok])) {
        swap_adjacent(T, U, k);
        std::swap(origin[ok], origin[ok + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
}

}  // namespace

QRPair qr_decompose(const ComplexMatrix& M) {
  const Index rows = M.rows(), cols = M.cols();
  if (cols > rows) throw ShapeError("QR needs at least as many rows as columns");
  QRPair out{ComplexMatrix::Zero(rows, cols), ComplexMatrix::Zero(cols, cols)};
  for (Index j = 0; j < cols; ++j) {
    ComplexVector r = M.col(j);
    const double input_norm = r.norm();
    for (int pass = 0; pass < 2; ++pass) {
      const ComplexVector h = out.Q.leftCols(j).adjoint() * r;
      r.noalias() -= out.Q.leftCols(j) * h;
      out.R.col(j).head(j) += h;
    }
    const double norm = r.norm();
    if (!(norm > kRankTolerance * input_norm)) throw RankDeficient(static_cast<std::size_t>(j));
    out.R(j, j) = norm;
    out.Q.col(j) = r / norm;
  }
  return out;
}

QRPair qr_decompose(const DenseMatrix& M) { return qr_decompose(ComplexMatrix(M.cast<Complex>())); }

SchurDecomposition schur_decompose(const DenseMatrix& M, std::optional<std::size_t> max_sweeps,
                                   double tol) {
  if (M.rows() != M.cols())
    throw ShapeError("Schur decomposition needs a square matrix, got " +
                     std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  if (!M.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  const Index n = M.rows();
  SchurDecomposition S;
  S.T = M.cast<Complex>();
  S.U = ComplexMatrix::Identity(n, n);
  reduce_to_hessenberg(S.T, S.U);
  qr_iterate(S.T, S.U, max_sweeps.value_or(30 * static_cast<std::size_t>(std::max<Index>(n, 1))),
             tol);
  S.T.triangularView<Eigen::StrictlyLower>().setZero();
  sort_schur(S.T, S.U);
  S.eigenvalues = S.T.diagonal();
  return S;
}

Eigenpair leading_eigvec(const SchurDecomposition& S) {
  const Index n = S.n();
  if (n == 0) throw EmptyInput("Schur decomposition");
  constexpr double tie = 1e-12;
  Index best = 0;
  for (Index i = 1; i < n; ++i) {
    const Complex a = S.eigenvalues[i], b = S.eigenvalues[best];
    const double da = std::abs(a.real() - 1.0), db = std::abs(b.real() - 1.0);
    if (da < db - tie || (std::abs(da - db) <= tie && std::abs(a.imag()) < std::abs(b.imag()) - tie))
      best = i;
  }

  Eigenpair out;
  out.lambda = S.eigenvalues[best];
  if (best == 0) {
    out.v = S.U.col(0);
  } else {
    // (T - lambda I) y = 0 with y(best) = 1 and y(k) = 0 below.
    const double small = std::max(S.T.cwiseAbs().maxCoeff(), 1.0) *
                         std::numeric_limits<double>::epsilon();
    ComplexVector y = ComplexVector::Zero(n);
    y[best] = 1.0;
    for (Index k = best - 1; k >= 0; --k) {
      const Complex rhs = -(S.T.row(k).segment(k + 1, best - k) * y.segment(k + 1, best - k))(0);
      Complex denom = S.T(k, k) - out.lambda;
      if (std::abs(denom) < small) denom = small;
      y[k] = rhs / denom;
    }
    out.v = S.U * y;
  }
  out.v.normalize();
  return out;
}

Aggregation aggregated_stationary(Aggregation agg) {
  if (agg.Pi.rows() != agg.Pi.cols())
    throw ShapeError("aggregated step matrix must be square");
  if (agg.A.rows() != agg.Pi.rows())
    throw DimensionMismatch(agg.Pi.rows(), agg.A.rows(), "disaggregation matrix rows");

  // Left eigenvector of Pi = right eigenvector of Pi^T.
  const SchurDecomposition S = schur_decompose(agg.Pi.transpose());
  Eigenpair pair = leading_eigvec(S);

  Index pivot = 0;
  pair.v.cwiseAbs().maxCoeff(&pivot);
  const Complex phase = pair.v[pivot] / std::abs(pair.v[pivot]);
  pair.v /= phase;
  const double imag = pair.v.imag().cwiseAbs().maxCoeff();
  if (imag > kImaginaryTolerance) throw ComplexStationary(imag);

  Vector pi = pair.v.real();
  const Vector p = agg.A.transpose() * pi;
  const double mass = p.lpNorm<1>();
  if (!(mass > 0.0)) throw ZeroVector();
  pi /= mass;
  if (p.sum() < 0.0) pi = -pi;
  agg.pi_stationary = std::move(pi);
  return agg;
}

}  // namespace arnagg
