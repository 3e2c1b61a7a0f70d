#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arnagg/arnoldi.hpp"
#include "arnagg/schur.hpp"

namespace arnagg {

enum class NormalizationMode { Never, Conditional, Always };

struct NormalizationPolicy {
  NormalizationMode mode = NormalizationMode::Never;
  double tolerance = 1e-6;  // eps_c, used by Conditional only

  NormalizationPolicy() = default;
  /// Throws InvalidArgument unless tolerance > 0.
  explicit NormalizationPolicy(NormalizationMode m, double tol = 1e-6);
};

NormalizationMode parse_normalization_mode(std::string_view name);  // never | cond | always
std::string to_string(NormalizationMode mode);

/// Which test of the conditional policy asks for a rescale, in the order they
/// are checked.
enum class NormalizationRule {
  EntryBelowMinusOne,   // some entry <= -1 - eps
  EntryAboveNineEighths,// some entry >= 9/8 + eps
  NonPositiveMass,      // all entries <= eps and ||p||_1 >= 1 - eps
  MassAtLeastTwo,       // ||p||_1 >= 2 - eps
  PartialSumBelowMinusOne,  // sum(p) - max(p) <= -1 - eps
};

std::optional<NormalizationRule> conditional_rule(const Eigen::Ref<const Vector>& p, double eps);

/// Applies the policy; divides by ||p||_1 when it triggers.
/// Throws ZeroVector when a triggered rescale meets ||p||_1 = 0.
Vector normalize(const Eigen::Ref<const Vector>& p, const NormalizationPolicy& policy);
Distribution normalize(const Distribution& p, const NormalizationPolicy& policy);

/// out^T = pi^T Pi. `out` must not alias `pi`.
void aggregated_step(const Aggregation& agg, const Eigen::Ref<const Vector>& pi,
                     Eigen::Ref<Vector> out);
Vector aggregated_step(const Aggregation& agg, const Eigen::Ref<const Vector>& pi);

/// p~^T = pi^T A, then the policy.
Distribution approximate(const Aggregation& agg, const Eigen::Ref<const Vector>& pi,
                         const NormalizationPolicy& policy = {});

/// Pi A - A P, an m x n matrix shared by the error bounds and the criterion.
DenseMatrix exactness_defect(const Aggregation& agg, const StochasticMatrix& P);

struct ErrorTrace {
  std::vector<std::size_t> steps;
  std::vector<double> e_k;
  std::vector<double> bound_specific;
  std::vector<double> bound_general;
  double static_error = 0.0;                 // ||Pi A - A P||_inf
  std::optional<double> criterion;           // <|pi|, |Pi A - A P| 1>
  std::optional<double> stationary_residual; // ||p~ - p~ P||_1
};

struct TraceOptions {
  bool bounds = true;      // accumulate bound_specific / evaluate bound_general
  bool stationary = true;  // criterion and residual when agg carries pi
};

/// Steps p_k and pi_k together up to max(ks) and records the 1-norm error
/// at every requested k. ks must be non-decreasing.
ErrorTrace error_trace(const StochasticMatrix& P, const Distribution& p0, const Aggregation& agg,
                       const std::vector<std::size_t>& ks, const NormalizationPolicy& policy = {},
                       const TraceOptions& options = {});
ErrorTrace error_trace(const StochasticMatrix& P, const Distribution& p0, const Aggregation& agg,
                       const DenseMatrix& defect, const std::vector<std::size_t>& ks,
                       const NormalizationPolicy& policy = {}, const TraceOptions& options = {});

/// ||e_0||_1 + ||pi_0||_1 ||D||_inf (a^k - 1)/(a - 1), a = ||Pi||_inf,
/// with the linear form k when |a - 1| <= 1e-12.
double general_bound(double e0, double pi0_norm1, double defect_norm, double pi_norm, std::size_t k);

/// Columns k, e_k, bound_specific, bound_general with a header row.
void write_trace_csv(const ErrorTrace& trace, std::ostream& out);

/// <|pi|, |Pi A - A P| 1>. Throws MissingStationary without pi.
double convergence_criterion(const StochasticMatrix& P, const Aggregation& agg);
double convergence_criterion(const Aggregation& agg, const DenseMatrix& defect);

/// ||p~^T - p~^T P||_1 with p~^T = pi^T A. Throws MissingStationary.
double stationary_residual(const StochasticMatrix& P, const Aggregation& agg);

Aggregation pipeline_naive(const StochasticMatrix& P, const Distribution& p0, Index size,
                           OrthMethod method = {});
Aggregation pipeline_schur(const StochasticMatrix& P, const Distribution& p0, Index size,
                           OrthMethod method = {});

struct DynamicCheck {
  Index size;
  double criterion;  // infinity when the leading eigenpair was complex
};

struct DynamicResult {
  Aggregation aggregation;  // carries pi
  double criterion = 0.0;
  bool converged = false;   // criterion <= epsilon
  bool deflated = false;
  std::vector<DynamicCheck> checks;

  Index size() const noexcept { return aggregation.size(); }
};

/// Grows the factorization one vector at a time and evaluates the criterion
/// at every multiple of step_size, at max_size, and on deflation. Stops at
/// the first check with criterion <= epsilon.
DynamicResult pipeline_dynamic(const StochasticMatrix& P, const Distribution& p0, Index max_size,
                               double epsilon, Index step_size, OrthMethod method = {});

}  // namespace arnagg
