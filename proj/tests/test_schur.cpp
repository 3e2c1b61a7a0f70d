#include <doctest.h>

#include <random>

#include "arnagg/models.hpp"
#include "arnagg/schur.hpp"
#include "oracles.hpp"

using namespace arnagg;

namespace {

DenseMatrix random_matrix(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DenseMatrix M(n, n);
  for (Index i = 0; i < M.size(); ++i) M.data()[i] = normal(rng);
  return M;
}

double reconstruction_error(const DenseMatrix& M, const SchurDecomposition& S) {
  const ComplexMatrix diff = M.cast<Complex>() - S.U * S.T * S.U.adjoint();
  return diff.cwiseAbs().rowwise().sum().maxCoeff();
}

double unitarity_error(const ComplexMatrix& U) {
  const ComplexMatrix diff = U * U.adjoint() - ComplexMatrix::Identity(U.rows(), U.cols());
  return diff.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

TEST_CASE("qr_decompose") {
  const QRPair id = qr_decompose(DenseMatrix(DenseMatrix::Identity(3, 3)));
  CHECK(id.Q == ComplexMatrix::Identity(3, 3));
  CHECK(id.R == ComplexMatrix::Identity(3, 3));

  DenseMatrix M(2, 2);
  M << 1, 1, 1, 0;
  const QRPair qr = qr_decompose(M);
  CHECK((qr.Q * qr.R - M.cast<Complex>()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(std::abs(qr.R(1, 0)) == 0.0);
  for (Index i = 0; i < 2; ++i) {
    CHECK(qr.R(i, i).imag() == 0.0);
    CHECK(qr.R(i, i).real() >= 0.0);
  }

  DenseMatrix twins(3, 2);
  twins << 1, 1, 2, 2, 3, 3;
  try {
    qr_decompose(twins);
    FAIL("expected RankDeficient");
  } catch (const RankDeficient& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("Schur form of a diagonal matrix is a sorted permutation") {
  const DenseMatrix M = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const SchurDecomposition S = schur_decompose(M);
  CHECK(S.eigenvalues[0] == Complex(3.0));
  CHECK(S.eigenvalues[1] == Complex(2.0));
  CHECK(S.eigenvalues[2] == Complex(1.0));
  CHECK((S.U.cwiseAbs().array() * (1.0 - S.U.cwiseAbs().array())).abs().maxCoeff() <= 1e-15);
  CHECK(reconstruction_error(M, S) <= 1e-14);
}

TEST_CASE("Schur form of the swap matrix") {
  DenseMatrix M(2, 2);
  M << 0, 1, 1, 0;
  const SchurDecomposition S = schur_decompose(M);
  CHECK(std::abs(S.eigenvalues[0] - 1.0) <= 1e-14);
  CHECK(std::abs(S.eigenvalues[1] + 1.0) <= 1e-14);
}

TEST_CASE("Schur invariants on random matrices") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 30);
    const DenseMatrix M = random_matrix(n, seed);
    const SchurDecomposition S = schur_decompose(M);
    CHECK(reconstruction_error(M, S) <= 1e-9 * inf_norm(M));
    CHECK(unitarity_error(S.U) <= 1e-10);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j) CHECK(std::abs(S.T(i, j)) <= 1e-10);
    for (Index i = 0; i + 1 < n; ++i)
      CHECK(S.eigenvalues[i].real() >= S.eigenvalues[i + 1].real() - 1e-12);
    if (n <= 5) {
      const auto roots = oracle::polynomial_roots(oracle::characteristic_polynomial(M));
      std::vector<Complex> eig(S.eigenvalues.data(), S.eigenvalues.data() + n);
      CHECK(oracle::multiset_distance(eig, roots) <= 1e-6);
    }
  }
}

TEST_CASE("conjugate pairs sort by original position") {
  DenseMatrix R(2, 2);
  R << 0, -1, 1, 0;
  const SchurDecomposition a = schur_decompose(R);
  const SchurDecomposition b = schur_decompose(R);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(std::abs(a.eigenvalues[0].imag()) == doctest::Approx(1.0));
}

TEST_CASE("Arnoldi Hessenberg of a stochastic chain leads with 1") {
  const StochasticMatrix P = random_chain(10, 0.4, 12);
  const Distribution p0 = random_distribution(10, 13);
  const ArnoldiFactorization f = arnoldi_iterate(P, p0, 10);
  const SchurDecomposition S = schur_decompose(f.H.transpose());
  CHECK(std::abs(S.eigenvalues[0] - 1.0) <= 1e-10);
}

TEST_CASE("leading_eigvec") {
  const DenseMatrix D = Eigen::Vector2d(1.0, 0.5).asDiagonal();
  const Eigenpair a = leading_eigvec(schur_decompose(D));
  CHECK(a.lambda == Complex(1.0));
  CHECK(std::abs(std::abs(a.v[0]) - 1.0) <= 1e-15);

  DenseMatrix M(2, 2);
  M << 0.9, 0.1, 0.2, 0.8;
  const Eigenpair b = leading_eigvec(schur_decompose(M));
  CHECK(std::abs(b.lambda - 1.0) <= 1e-12);
  CHECK((M.cast<Complex>() * b.v - b.lambda * b.v).norm() <= 1e-8);
  // Right eigenvector of a stochastic matrix is the constant vector.
  CHECK(std::abs(std::abs(b.v[0]) - std::abs(b.v[1])) <= 1e-12);

  const Eigenpair c = leading_eigvec(schur_decompose(DenseMatrix::Zero(1, 1)));
  CHECK(c.lambda == Complex(0.0));
  CHECK(std::abs(c.v[0]) == 1.0);
}

TEST_CASE("leading_eigvec back-substitutes when the eigenvalue is not first") {
  DenseMatrix T(3, 3);
  T << 3, 1, 2, 0, 1.1, 4, 0, 0, 0.2;
  const DenseMatrix Q = qr_decompose(random_matrix(3, 5)).Q.real();
  const DenseMatrix M = Q * T * Q.transpose();
  const SchurDecomposition S = schur_decompose(M);
  const Eigenpair e = leading_eigvec(S);
  CHECK(std::abs(e.lambda - 1.1) <= 1e-12);
  CHECK((M.cast<Complex>() * e.v - e.lambda * e.v).norm() <= 1e-8);
  CHECK(std::abs(e.v.norm() - 1.0) <= 1e-14);
}

TEST_CASE("aggregated_stationary") {
  Aggregation one;
  one.Pi = DenseMatrix::Ones(1, 1);
  Vector q(3);
  q << 0.6, 0.0, 0.8;
  one.A = q.transpose();
  one.pi0 = Vector::Ones(1);
  const Aggregation s = aggregated_stationary(one);
  REQUIRE(s.pi_stationary);
  CHECK((*s.pi_stationary)[0] == doctest::Approx(1.0 / 1.4));

  const auto [P, p0] = counterexample(0.5);
  const Aggregation c = aggregated_stationary(build_aggregation(arnoldi_iterate(P, p0, 1), p0));
  CHECK(*c.pi_stationary == Vector::Ones(1));
}

TEST_CASE("stationary vector of a full-size aggregation") {
  const StochasticMatrix P = random_chain(10, 0.4, 2);
  const Distribution p0 = random_distribution(10, 3);
  const Aggregation agg = aggregated_stationary(build_aggregation(arnoldi_iterate(P, p0, 10), p0));
  const Vector p = agg.A.transpose() * *agg.pi_stationary;
  CHECK(std::abs(p.lpNorm<1>() - 1.0) <= 1e-10);
  CHECK((p - oracle::stationary(P.to_dense())).lpNorm<1>() <= 1e-8);
}

TEST_CASE("complex leading eigenvector is reported") {
  const double t = 0.3;
  Aggregation rot;
  rot.Pi.resize(2, 2);
  rot.Pi << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  rot.A = DenseMatrix::Identity(2, 2);
  rot.pi0 = Vector::Unit(2, 0);
  CHECK_THROWS_AS(aggregated_stationary(rot), ComplexStationary);
}

TEST_CASE("QR iteration gives up after max_sweeps") {
  DenseMatrix M(2, 2);
  M << 0, 1, 1, 0;
  CHECK_THROWS_AS(schur_decompose(M, 0), NoConvergence);
  CHECK_THROWS_AS(schur_decompose(DenseMatrix::Ones(2, 3)), ShapeError);
}
