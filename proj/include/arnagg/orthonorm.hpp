#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arnagg/mchain.hpp"

namespace arnagg {

enum class OrthVariant { CGS, MGS, CGS2, MGS2, CGSIR, MGSIR };

inline constexpr double kDefaultReorthThreshold = 0.70710678118654752440;  // 1/sqrt(2)
inline constexpr double kRankTolerance = 1e-13;

/// Gram-Schmidt flavour. The *2 variants always run two projection passes,
/// the *IR variants run the second pass only when the first one removed more
/// than a fraction 1 - kappa of the norm (||r|| < kappa ||v||).
struct OrthMethod {
  OrthVariant variant = OrthVariant::CGSIR;
  double reorth_threshold = kDefaultReorthThreshold;

  OrthMethod() = default;
  /// Throws InvalidArgument unless kappa lies in (0, 1).
  explicit OrthMethod(OrthVariant v, double kappa = kDefaultReorthThreshold);

  bool classical() const noexcept;
};

OrthVariant parse_orth_variant(std::string_view name);  // "cgs", "mgs2", ...
std::string to_string(OrthVariant variant);

struct OrthStepResult {
  Vector residual;
  Vector coefficients;  // projections onto basis[0..], accumulated over passes
  double residual_norm = 0.0;
};

/// Removes the components of `v` along the orthonormal vectors in `basis`.
OrthStepResult orthogonalize_step(const Eigen::Ref<const Vector>& v, std::span<const Vector> basis,
                                  const OrthMethod& method);

/// Allocation-free form used by the Arnoldi loop. On entry `r` holds the
/// vector, on exit the residual. `h` receives basis.size() coefficients and
/// `scratch` must be at least that long. Returns the residual 2-norm.
double orthogonalize_in_place(Eigen::Ref<Vector> r, std::span<const Vector> basis,
                              const OrthMethod& method, Eigen::Ref<Vector> h,
                              Eigen::Ref<Vector> scratch);

struct OrthonormalBasis {
  std::vector<Vector> basis;
  DenseMatrix R;  // vectors[i] = sum_k R(k, i) basis[k]
};

/// Orthonormalizes `vectors` in order. Throws RankDeficient(i) when the
/// residual of vectors[i] is at most 1e-13 times its norm.
OrthonormalBasis orthonormalize_all(std::span<const Vector> vectors, const OrthMethod& method);

/// max |<q_i, q_j> - delta_ij|
double orthogonality_loss(std::span<const Vector> basis);

}  // namespace arnagg
