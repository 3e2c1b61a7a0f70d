#include <doctest.h>

#include <sstream>

#include "arnagg/aggregate.hpp"
#include "arnagg/models.hpp"
#include "oracles.hpp"

using namespace arnagg;

namespace {

std::vector<std::size_t> range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t k = first; k <= last; ++k) out.push_back(k);
  return out;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (const double x : values) v[i++] = x;
  return v;
}

const NormalizationPolicy kCond(NormalizationMode::Conditional);
const NormalizationPolicy kAlways(NormalizationMode::Always);

}  // namespace

TEST_CASE("normalize") {
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  CHECK(normalize(third, kCond) == third);
  CHECK(normalize(vec({-2, 0}), kCond) == vec({-1, 0}));
  CHECK(normalize(vec({2, 2}), kAlways) == vec({0.5, 0.5}));
  CHECK(normalize(vec({2, 2}), NormalizationPolicy{}) == vec({2, 2}));
  CHECK_THROWS_AS(normalize(Vector::Zero(3), kAlways), ZeroVector);
  CHECK_THROWS_AS(NormalizationPolicy(NormalizationMode::Conditional, 0.0), InvalidArgument);
}

TEST_CASE("conditional rules fire on their hypotheses") {
  const double eps = 1e-6;
  CHECK(conditional_rule(vec({-1.5, 0.5, 0.2}), eps) == NormalizationRule::EntryBelowMinusOne);
  CHECK(conditional_rule(vec({1.2, -0.1, 0.0}), eps) == NormalizationRule::EntryAboveNineEighths);
  CHECK(conditional_rule(vec({-0.5, -0.6, 0.0}), eps) == NormalizationRule::NonPositiveMass);
  CHECK(conditional_rule(vec({1.0, -0.5, 0.6}), eps) == NormalizationRule::MassAtLeastTwo);
  // Signed total minus the largest entry: -0.6 - 0.5 = -1.1, mass 1.6.
  CHECK(conditional_rule(vec({0.5, -0.7, -0.4}), eps) ==
        NormalizationRule::PartialSumBelowMinusOne);
  CHECK_FALSE(conditional_rule(vec({0.5, 0.3, 0.2}), eps).has_value());
  CHECK_FALSE(conditional_rule(vec({-1.0, 0.5, 0.0}), eps).has_value());
}

TEST_CASE("aggregated_step") {
  Aggregation agg;
  agg.Pi = DenseMatrix::Identity(3, 3);
  agg.A = DenseMatrix::Identity(3, 3);
  agg.pi0 = vec({0.2, 0.3, 0.5});
  CHECK(aggregated_step(agg, agg.pi0) == agg.pi0);

  const auto [P, p0] = counterexample(0.5);
  const Aggregation c = pipeline_naive(P, p0, 1);
  CHECK(aggregated_step(c, c.pi0) == Vector::Zero(1));
  CHECK(approximate(c, aggregated_step(c, c.pi0)).values() == Vector::Zero(3));

  const DenseMatrix Pi = DenseMatrix::Random(4, 4);
  agg.Pi = Pi;
  agg.A = DenseMatrix::Identity(4, 4);
  agg.pi0 = Vector::Random(4);
  Vector pi = agg.pi0;
  for (int k = 0; k < 3; ++k) pi = aggregated_step(agg, pi);
  const Vector expected = (agg.pi0.transpose() * oracle::matrix_power(Pi, 3)).transpose();
  CHECK((pi - expected).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK_THROWS_AS(aggregated_step(agg, Vector::Ones(3)), DimensionMismatch);
}

TEST_CASE("approximate") {
  const StochasticMatrix P = random_chain(15, 0.4, 2);
  const Distribution p0 = random_distribution(15, 3);
  const Aggregation agg = pipeline_naive(P, p0, 5);
  CHECK((approximate(agg, agg.pi0).values() - p0.values()).lpNorm<1>() <= 1e-13);
  const Vector pi = aggregated_step(agg, aggregated_step(agg, agg.pi0));
  CHECK(std::abs(approximate(agg, pi, kAlways).values().lpNorm<1>() - 1.0) <= 1e-12);
}

TEST_CASE("counterexample trace meets the general bound with equality") {
  const auto [P, p0] = counterexample(0.5);
  const Aggregation agg = pipeline_naive(P, p0, 1);
  const ErrorTrace t = error_trace(P, p0, agg, {0, 1, 2});
  CHECK(t.e_k == std::vector<double>{0, 1, 1});
  CHECK(t.bound_general == std::vector<double>{0, 1, 1});
  CHECK(t.bound_specific == std::vector<double>{0, 1, 1});
  CHECK(t.static_error == 1.0);

  std::ostringstream csv;
  write_trace_csv(t, csv);
  CHECK(csv.str() == "k,e_k,bound_specific,bound_general\n0,0,0,0\n1,1,1,1\n2,1,1,1\n");
}

TEST_CASE("identity chain has no error") {
  const StochasticMatrix I = validate_stochastic(DenseMatrix::Identity(5, 5));
  const Distribution p0 = random_distribution(5, 8);
  const ErrorTrace t = error_trace(I, p0, pipeline_naive(I, p0, 5), range(0, 20));
  for (const double e : t.e_k) CHECK(e <= 1e-12);
}

TEST_CASE("errors stay below both bounds") {
  const StochasticMatrix P = random_chain(20, 0.3, 5);
  const Distribution p0 = random_distribution(20, 6);
  const Aggregation agg = pipeline_naive(P, p0, 10);
  const ErrorTrace t = error_trace(P, p0, agg, range(0, 50));
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    CHECK(t.e_k[i] <= t.bound_specific[i] + 1e-8);
    CHECK(t.bound_specific[i] <= t.bound_general[i] + 1e-8);
    if (i > 0) CHECK(t.bound_specific[i] >= t.bound_specific[i - 1]);
  }
  // Brute-force check of e_k against the dense oracle.
  const DenseMatrix D = P.to_dense();
  for (const int k : {0, 7, 23}) {
    Vector pi = agg.pi0;
    for (int s = 0; s < k; ++s) pi = agg.Pi.transpose() * pi;
    const double e = (agg.A.transpose() * pi - oracle::transient(D, p0.values(), k)).lpNorm<1>();
    CHECK(std::abs(e - t.e_k[static_cast<std::size_t>(k)]) <= 1e-12);
  }
  CHECK_THROWS_AS(error_trace(P, p0, agg, {3, 1}), InvalidArgument);
}

TEST_CASE("general bound switches to the linear form near 1") {
  CHECK(general_bound(0.0, 1.0, 2.0, 1.0, 5) == 10.0);
  CHECK(general_bound(0.0, 1.0, 2.0, 1.0 + 1e-13, 5) == 10.0);
  CHECK(general_bound(0.5, 1.0, 1.0, 2.0, 3) == doctest::Approx(7.5));
  CHECK(general_bound(0.0, 1.0, 1.0, 0.0, 0) == 0.0);
}

TEST_CASE("convergence criterion") {
  const auto [P, p0] = counterexample(0.3);
  const Aggregation c = pipeline_schur(P, p0, 1);
  CHECK(convergence_criterion(P, c) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(convergence_criterion(P, pipeline_naive(P, p0, 1)), MissingStationary);

  const StochasticMatrix R = random_chain(10, 0.5, 1);
  const Distribution q0 = random_distribution(10, 2);
  const Aggregation full = pipeline_schur(R, q0, 10);
  CHECK(convergence_criterion(R, full) <= 1e-10);
  CHECK(stationary_residual(R, full) <= 1e-8);
}

TEST_CASE("criterion shrinks with the aggregation size on an NCD chain") {
  const StochasticMatrix P = random_ncd(3, 10, 1e-3, 4);
  const Distribution p0 = random_distribution(30, 5);
  const double half = convergence_criterion(P, pipeline_schur(P, p0, 15));
  const double full = convergence_criterion(P, pipeline_schur(P, p0, 30));
  CHECK(full <= half);
}

TEST_CASE("pipelines compose their parts") {
  const StochasticMatrix P = random_chain(12, 0.5, 3);
  const Distribution p0 = random_distribution(12, 4);
  const Aggregation a = pipeline_naive(P, p0, 6);
  const Aggregation b = build_aggregation(arnoldi_iterate(P, p0, 6), p0);
  CHECK(a.Pi == b.Pi);
  CHECK(a.A == b.A);
  CHECK(a.pi0 == b.pi0);
  CHECK_FALSE(a.pi_stationary.has_value());

  const StochasticMatrix I = validate_stochastic(DenseMatrix::Identity(4, 4));
  const Distribution u = uniform_distribution(4);
  const Aggregation s = pipeline_schur(I, u, 4);
  REQUIRE(s.size() == 1);
  CHECK((*s.pi_stationary)[0] == doctest::Approx(1.0 / s.A.row(0).lpNorm<1>()));
}

TEST_CASE("dynamic pipeline") {
  const StochasticMatrix I = validate_stochastic(DenseMatrix::Identity(4, 4));
  const DynamicResult r = pipeline_dynamic(I, uniform_distribution(4), 4, 1e-8, 1);
  CHECK(r.size() == 1);
  CHECK(r.converged);

  const auto [P, p0] = counterexample(0.5);
  const DynamicResult c = pipeline_dynamic(P, p0, 3, 0.5, 1);
  CHECK(c.checks.front().size == 1);
  CHECK(c.checks.front().criterion == doctest::Approx(1.0));
  CHECK(c.size() > 1);

  CHECK_THROWS_AS(pipeline_dynamic(P, p0, 3, 0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(pipeline_dynamic(P, p0, 3, 0.0, 1), InvalidArgument);
}

TEST_CASE("dynamic pipeline agrees with an exhaustive sweep") {
  const StochasticMatrix P = random_ncd(3, 10, 1e-3, 9);
  const Distribution p0 = random_distribution(30, 10);
  const double eps = 1e-10;
  Index first = -1;
  for (Index j = 1; j <= 30 && first < 0; ++j)
    if (convergence_criterion(P, pipeline_schur(P, p0, j)) <= eps) first = j;
  REQUIRE(first > 0);
  const DynamicResult r = pipeline_dynamic(P, p0, 30, eps, 5);
  CHECK(r.converged);
  CHECK(r.criterion <= eps);
  CHECK(r.size() >= first);
  CHECK(r.size() <= first + 4);
}

TEST_CASE("dynamic pipeline steps over complex intermediate sizes") {
  DenseMatrix M = DenseMatrix::Zero(4, 4);
  for (Index i = 0; i < 4; ++i) M(i, (i + 1) % 4) = 1.0;
  const StochasticMatrix P = validate_stochastic(M);
  const Distribution p0 = random_distribution(4, 5);
  CHECK_THROWS_AS(pipeline_schur(P, p0, 2), ComplexStationary);
  const DynamicResult r = pipeline_dynamic(P, p0, 4, 1e-8, 1);
  REQUIRE(r.checks.size() >= 2);
  CHECK(r.checks[1].criterion == std::numeric_limits<double>::infinity());
  CHECK(r.converged);
  CHECK(r.criterion <= 1e-8);
  CHECK_THROWS_AS(pipeline_dynamic(P, p0, 2, 1e-8, 1), ComplexStationary);
}
