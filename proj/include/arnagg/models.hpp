#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "arnagg/mchain.hpp"

namespace arnagg {

/// Nearly completely decomposable chain: blockdiag(P_1, ..., P_N) + eps C.
/// Off-diagonal entries of C lie in {-1, 0, 1}, the diagonal may hold any
/// integer, and every row of C sums to zero.
struct NcdSpec {
  std::vector<StochasticMatrix> blocks;
  Eigen::MatrixXi C;
  double epsilon = 0.0;
};

/// Throws EpsilonOutOfRange, ShapeError when the block sizes do not add up
/// to the size of C, and InvalidCoupling for a malformed C or an entry of the
/// result outside [0, 1].
StochasticMatrix ncd_compose(const NcdSpec& spec);

/// Three-state chain on which the geometric error bound is attained:
/// P = [[1-eps, eps, 0], [0, 1, 0], [0, 1, 0]], p0 = (0, 0, 1).
std::pair<StochasticMatrix, Distribution> counterexample(double epsilon);

/// Each row gets max(1, round(density n)) nonzero columns drawn without
/// replacement, always including the cyclic successor (i + 1) mod n, with
/// exponential weights. Deterministic per seed; sparse storage.
StochasticMatrix random_chain(Index n, double density, std::uint64_t seed);

/// n_blocks dense random blocks coupled with strength epsilon: every row moves
/// eps from its largest in-block entry to a random state of another block.
StochasticMatrix random_ncd(Index n_blocks, Index block_size, double epsilon, std::uint64_t seed);

/// Random strict distribution with exponential weights.
Distribution random_distribution(Index n, std::uint64_t seed);
Distribution uniform_distribution(Index n);
Distribution point_distribution(Index n, Index state);

}  // namespace arnagg
