#include <doctest.h>

#include "arnagg/arnoldi.hpp"
#include "arnagg/models.hpp"
#include "oracles.hpp"

using namespace arnagg;

namespace {

double dense_static_error(const ArnoldiFactorization& f, const DenseMatrix& P) {
  const DenseMatrix Q = f.basis_matrix();
  return inf_norm(f.H * Q - Q * P);
}

}  // namespace

TEST_CASE("identity chain deflates immediately") {
  const StochasticMatrix I = validate_stochastic(DenseMatrix::Identity(6, 6));
  const Distribution p0 = random_distribution(6, 3);
  const ArnoldiFactorization f = arnoldi_iterate(I, p0, 5);
  CHECK(f.deflated);
  CHECK(f.size() == 1);
  CHECK(f.H(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((f.basis[0] - p0.values() / p0.values().norm()).norm() <= 1e-15);
  CHECK_FALSE(f.residual_direction.has_value());

  const Aggregation agg = build_aggregation(f, p0);
  CHECK(agg.Pi.rows() == 1);
  CHECK(agg.pi0[0] == doctest::Approx(p0.values().norm()));
}

TEST_CASE("counterexample at size one") {
  for (const double eps : {0.1, 0.5, 0.9}) {
    const auto [P, p0] = counterexample(eps);
    const ArnoldiFactorization f = arnoldi_iterate(P, p0, 1);
    CHECK(f.size() == 1);
    CHECK(f.H(0, 0) == 0.0);
    CHECK(f.basis[0] == Vector::Unit(3, 2));
    CHECK(f.residual_norm == 1.0);
    const Aggregation agg = build_aggregation(f, p0);
    CHECK(agg.Pi(0, 0) == 0.0);
    CHECK(agg.pi0[0] == 1.0);
  }
}

TEST_CASE("Arnoldi relation and orthonormality on random chains") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const StochasticMatrix P = random_chain(8, 0.5, seed);
    const Distribution p0 = random_distribution(8, seed + 100);
    const ArnoldiFactorization f = arnoldi_iterate(P, p0, 8);
    CHECK(relation_residual(f, P) <= 1e-10);
    CHECK(orthogonality_loss(f.basis) <= 1e-10);
    if (f.deflated && f.size() < 8) CHECK(dense_static_error(f, P.to_dense()) <= 1e-9);
    // Hessenberg pattern in row orientation.
    for (Index i = 0; i < f.size(); ++i)
      for (Index l = i + 2; l < f.size(); ++l) CHECK(f.H(i, l) == 0.0);
  }
}

TEST_CASE("relation residual for the stable methods") {
  const StochasticMatrix P = random_chain(20, 0.4, 17);
  const Distribution p0 = random_distribution(20, 18);
  for (const auto variant : {OrthVariant::MGS, OrthVariant::CGS2, OrthVariant::MGS2,
                             OrthVariant::CGSIR, OrthVariant::MGSIR}) {
    const ArnoldiFactorization f = arnoldi_iterate(P, p0, 10, OrthMethod(variant));
    CHECK(relation_residual(f, P) <= 1e-10);
  }
}

TEST_CASE("basis spans the Krylov space") {
  const StochasticMatrix P = random_chain(15, 0.5, 21);
  const Distribution p0 = random_distribution(15, 22);
  const ArnoldiFactorization f = arnoldi_iterate(P, p0, 5);
  const DenseMatrix K = oracle::krylov_rows(P.to_dense(), p0.values(), 5);
  const DenseMatrix Q = f.basis_matrix();
  const DenseMatrix projected = K * Q.transpose() * Q;
  CHECK((K - projected).norm() <= 1e-12 * K.norm());
}

TEST_CASE("aggregated initial vector reproduces p0") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const StochasticMatrix P = random_chain(12, 0.4, seed);
    const Distribution p0 = random_distribution(12, seed + 50);
    const Aggregation agg = build_aggregation(arnoldi_iterate(P, p0, 6), p0);
    CHECK((agg.A.transpose() * agg.pi0 - p0.values()).lpNorm<1>() <= 1e-13);
  }
}

TEST_CASE("aggregated transient vectors have a zero tail") {
  const StochasticMatrix P = random_chain(25, 0.3, 4);
  const Distribution p0 = random_distribution(25, 5);
  const Aggregation agg = build_aggregation(arnoldi_iterate(P, p0, 12), p0);
  Vector pi = agg.pi0;
  for (Index k = 0; k <= agg.size() - 2; ++k) {
    for (Index i = k + 1; i < agg.size(); ++i) CHECK(std::abs(pi[i]) <= 1e-10 * pi.norm());
    pi = agg.Pi.transpose() * pi;
  }
}

TEST_CASE("aggregation is (j-1)-exact") {
  const StochasticMatrix P = random_chain(30, 0.3, 9);
  const DenseMatrix D = P.to_dense();
  const Distribution p0 = random_distribution(30, 10);
  const Index j = 9;
  const Aggregation agg = build_aggregation(arnoldi_iterate(P, p0, j), p0);
  Vector pi = agg.pi0;
  for (int k = 0; k < j; ++k) {
    const Vector approx = agg.A.transpose() * pi;
    CHECK((approx - oracle::transient(D, p0.values(), k)).lpNorm<1>() <= 1e-9);
    pi = agg.Pi.transpose() * pi;
  }
}

TEST_CASE("deflation soundness") {
  // Two absorbing copies of the same 3-state cycle: the Krylov space of a
  // point mass closes after three steps.
  DenseMatrix M = DenseMatrix::Zero(6, 6);
  M(0, 1) = M(1, 2) = M(2, 0) = 1.0;
  M(3, 4) = M(4, 5) = M(5, 3) = 1.0;
  const StochasticMatrix P = validate_stochastic(M);
  const Distribution p0 = point_distribution(6, 0);
  const ArnoldiFactorization f = arnoldi_iterate(P, p0, 6);
  CHECK(f.deflated);
  CHECK(f.size() == 3);
  CHECK(relation_residual(f, P) <= kDefaultDeflationTolerance * 3 + 1e-10);
}

TEST_CASE("incremental process matches the batch call") {
  const StochasticMatrix P = random_chain(20, 0.5, 31);
  const Distribution p0 = random_distribution(20, 32);
  ArnoldiProcess process(P, p0.values(), 10);
  for (int i = 0; i < 7; ++i) process.expand();
  const ArnoldiFactorization a = process.snapshot();
  const ArnoldiFactorization b = arnoldi_iterate(P, p0, 7);
  CHECK(a.H == b.H);
  CHECK(a.basis_matrix() == b.basis_matrix());
  CHECK(a.residual_norm == b.residual_norm);
}

TEST_CASE("arnoldi_iterate input validation") {
  const StochasticMatrix P = random_chain(5, 1.0, 1);
  CHECK_THROWS_AS(arnoldi_iterate(P, Distribution::approximate(Vector::Zero(5)), 2),
                  ZeroInitialVector);
  CHECK_THROWS_AS(arnoldi_iterate(P, uniform_distribution(4), 2), DimensionMismatch);
  CHECK_THROWS_AS(arnoldi_iterate(P, uniform_distribution(5), 0), InvalidArgument);
  CHECK_THROWS_AS(arnoldi_iterate(P, uniform_distribution(5), 6), InvalidArgument);
}

TEST_CASE("full-size aggregation is exact at small n") {
  for (const Index n : {5, 12, 30}) {
    const StochasticMatrix P = random_chain(n, 0.5, static_cast<std::uint64_t>(n));
    const Distribution p0 = random_distribution(n, 7);
    const ArnoldiFactorization f = arnoldi_iterate(P, p0, n);
    CHECK(dense_static_error(f, P.to_dense()) <= 1e-8);
  }
}
