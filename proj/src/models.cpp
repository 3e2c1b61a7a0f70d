#include "arnagg/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace arnagg {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential() { return -std::log1p(-uniform()); }

  // Unbiased integer in [0, bound).
  std::uint64_t index(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

StochasticMatrix ncd_compose(const NcdSpec& spec) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) throw EpsilonOutOfRange(spec.epsilon);
  const Index n = spec.C.rows();
  if (spec.C.cols() != n) throw ShapeError("coupling matrix must be square");
  Index total = 0;
  for (const auto& block : spec.blocks) total += block.n();
  if (total != n)
    throw ShapeError("blocks cover " + std::to_string(total) + " states, coupling matrix has " +
                     std::to_string(n));

  for (Index i = 0; i < n; ++i) {
    if (spec.C.row(i).sum() != 0)
      throw InvalidCoupling("row " + std::to_string(i) + " of the coupling matrix sums to " +
                            std::to_string(spec.C.row(i).sum()));
    for (Index j = 0; j < n; ++j)
      if (i != j && (spec.C(i, j) < -1 || spec.C(i, j) > 1))
        throw InvalidCoupling("off-diagonal coupling entry " + std::to_string(spec.C(i, j)) +
                              " at (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") outside {-1, 0, 1}");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  Index offset = 0;
  for (const auto& block : spec.blocks) {
    block.storage().for_each_entry([&](Index i, Index j, double v) {
      if (v != 0.0) triplets.emplace_back(offset + i, offset + j, v);
    });
    offset += block.n();
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (spec.C(i, j) != 0) triplets.emplace_back(i, j, spec.epsilon * spec.C(i, j));

  SparseMatrix P(n, n);
  P.setFromTriplets(triplets.begin(), triplets.end());
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(P, i); it; ++it)
      if (!(it.value() >= -kStochasticTolerance && it.value() <= 1.0 + kStochasticTolerance))
        throw InvalidCoupling("entry (" + std::to_string(i) + ", " + std::to_string(it.col()) +
                              ") of the composed chain is " + std::to_string(it.value()));
  P.prune(0.0);
  return validate_stochastic(MatrixStorage(std::move(P)));
}

std::pair<StochasticMatrix, Distribution> counterexample(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw EpsilonOutOfRange(epsilon);
  NcdSpec spec;
  spec.blocks.push_back(validate_stochastic(DenseMatrix::Ones(1, 1)));
  DenseMatrix absorbing(2, 2);
  absorbing << 1, 0, 1, 0;
  spec.blocks.push_back(validate_stochastic(absorbing));
  spec.C = Eigen::MatrixXi::Zero(3, 3);
  spec.C(0, 0) = -1;
  spec.C(0, 1) = 1;
  spec.epsilon = epsilon;
  return {ncd_compose(spec), point_distribution(3, 2)};
}

StochasticMatrix random_chain(Index n, double density, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("chain needs at least one state");
  if (!(density > 0.0 && density <= 1.0))
    throw InvalidArgument("density must lie in (0, 1], got " + std::to_string(density));
  Rng rng(seed);
  const Index per_row = std::clamp<Index>(
      static_cast<Index>(std::llround(density * static_cast<double>(n))), 1, n);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * per_row));
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(per_row));
  for (Index i = 0; i < n; ++i) {
    std::iota(pool.begin(), pool.end(), Index{0});
    // Successor first, then a partial Fisher-Yates shuffle over the rest.
    std::swap(pool[0], pool[static_cast<std::size_t>((i + 1) % n)]);
    for (Index k = 1; k < per_row; ++k) {
      const auto pick = k + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
    }
    double total = 0.0;
    for (auto& w : weights) total += (w = rng.exponential());
    for (Index k = 0; k < per_row; ++k)
      triplets.emplace_back(i, pool[static_cast<std::size_t>(k)],
                            weights[static_cast<std::size_t>(k)] / total);
  }
  SparseMatrix P(n, n);
  P.setFromTriplets(triplets.begin(), triplets.end());
  return validate_stochastic(MatrixStorage(std::move(P)));
}

StochasticMatrix random_ncd(Index n_blocks, Index block_size, double epsilon, std::uint64_t seed) {
  if (n_blocks < 1 || block_size < 1) throw InvalidArgument("need at least one nonempty block");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw EpsilonOutOfRange(epsilon);
  Rng rng(seed);
  const Index n = n_blocks * block_size;

  NcdSpec spec;
  spec.epsilon = epsilon;
  spec.C = Eigen::MatrixXi::Zero(n, n);
  for (Index b = 0; b < n_blocks; ++b) {
    DenseMatrix block(block_size, block_size);
    for (Index i = 0; i < block_size; ++i) {
      for (Index j = 0; j < block_size; ++j) block(i, j) = rng.exponential();
      block.row(i) /= block.row(i).sum();
    }
    for (Index i = 0; i < block_size && n_blocks > 1; ++i) {
      Index largest = 0;
      block.row(i).maxCoeff(&largest);
      // Target: uniform over the states outside this block.
      auto target = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - block_size)));
      if (target >= b * block_size) target += block_size;
      const Index row = b * block_size + i;
      spec.C(row, b * block_size + largest) -= 1;
      spec.C(row, target) += 1;
    }
    spec.blocks.push_back(validate_stochastic(block));
  }
  return ncd_compose(spec);
}

Distribution random_distribution(Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("distribution needs at least one state");
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.exponential();
  v /= v.sum();
  return Distribution::strict(std::move(v));
}

Distribution uniform_distribution(Index n) {
  if (n < 1) throw InvalidArgument("distribution needs at least one state");
  return Distribution::strict(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Distribution point_distribution(Index n, Index state) {
  if (state < 0 || state >= n)
    throw InvalidArgument("state " + std::to_string(state) + " outside [0, " + std::to_string(n) +
                          ")");
  Vector v = Vector::Zero(n);
  v[state] = 1.0;
  return Distribution::strict(std::move(v));
}

}  // namespace arnagg
