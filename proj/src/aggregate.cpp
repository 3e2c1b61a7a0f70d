#include "arnagg/aggregate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "arnagg/matrix_io.hpp"

namespace arnagg {

NormalizationPolicy::NormalizationPolicy(NormalizationMode m, double tol) : mode(m), tolerance(tol) {
  if (!(tol > 0.0))
    throw InvalidArgument("normalization tolerance must be positive, got " + std::to_string(tol));
}

NormalizationMode parse_normalization_mode(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "never") return NormalizationMode::Never;
  if (key == "cond" || key == "conditional") return NormalizationMode::Conditional;
  if (key == "always") return NormalizationMode::Always;
  throw InvalidArgument("unknown normalization policy '" + std::string(name) + "'");
}

std::string to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::Never: return "never";
    case NormalizationMode::Conditional: return "cond";
    case NormalizationMode::Always: return "always";
  }
  return "unknown";
}

std::optional<NormalizationRule> conditional_rule(const Eigen::Ref<const Vector>& p, double eps) {
  if (p.size() == 0) return std::nullopt;
  const double lo = p.minCoeff(), hi = p.maxCoeff();
  const double mass = p.lpNorm<1>();
  if (lo <= -1.0 - eps) return NormalizationRule::EntryBelowMinusOne;
  if (hi >= 9.0 / 8.0 + eps) return NormalizationRule::EntryAboveNineEighths;
  if (hi <= eps && mass >= 1.0 - eps) return NormalizationRule::NonPositiveMass;
  if (mass >= 2.0 - eps) return NormalizationRule::MassAtLeastTwo;
  // Smallest sum over n-1 entries is the signed total minus the largest entry.
  if (p.sum() - hi <= -1.0 - eps) return NormalizationRule::PartialSumBelowMinusOne;
  return std::nullopt;
}

Vector normalize(const Eigen::Ref<const Vector>& p, const NormalizationPolicy& policy) {
  bool rescale = false;
  switch (policy.mode) {
    case NormalizationMode::Never: break;
    case NormalizationMode::Always: rescale = true; break;
    case NormalizationMode::Conditional:
      rescale = conditional_rule(p, policy.tolerance).has_value();
      break;
  }
  if (!rescale) return p;
  const double mass = p.lpNorm<1>();
  if (!(mass > 0.0)) throw ZeroVector();
  return p / mass;
}

Distribution normalize(const Distribution& p, const NormalizationPolicy& policy) {
  return Distribution::approximate(normalize(p.values(), policy));
}

void aggregated_step(const Aggregation& agg, const Eigen::Ref<const Vector>& pi,
                     Eigen::Ref<Vector> out) {
  if (pi.size() != agg.size()) throw DimensionMismatch(agg.size(), pi.size(), "aggregated vector");
  if (out.size() != agg.size()) throw DimensionMismatch(agg.size(), out.size(), "aggregated output");
  out.noalias() = agg.Pi.transpose() * pi;
}

Vector aggregated_step(const Aggregation& agg, const Eigen::Ref<const Vector>& pi) {
  Vector out(agg.size());
  aggregated_step(agg, pi, out);
  return out;
}

Distribution approximate(const Aggregation& agg, const Eigen::Ref<const Vector>& pi,
                         const NormalizationPolicy& policy) {
  if (pi.size() != agg.size()) throw DimensionMismatch(agg.size(), pi.size(), "aggregated vector");
  return Distribution::approximate(normalize(agg.A.transpose() * pi, policy));
}

DenseMatrix exactness_defect(const Aggregation& agg, const StochasticMatrix& P) {
  if (agg.n() != P.n()) throw DimensionMismatch(P.n(), agg.n(), "disaggregation matrix columns");
  DenseMatrix D = agg.Pi * agg.A;
  Vector row(P.n());
  for (Index i = 0; i < agg.size(); ++i) {
    P.left_multiply(agg.A.row(i).transpose(), row);
    D.row(i) -= row.transpose();
  }
  return D;
}

double general_bound(double e0, double pi0_norm1, double defect_norm, double pi_norm, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double growth = std::abs(pi_norm - 1.0) <= 1e-12
                            ? kd
                            : (std::pow(pi_norm, kd) - 1.0) / (pi_norm - 1.0);
  return e0 + pi0_norm1 * defect_norm * growth;
}

ErrorTrace error_trace(const StochasticMatrix& P, const Distribution& p0, const Aggregation& agg,
                       const std::vector<std::size_t>& ks, const NormalizationPolicy& policy,
                       const TraceOptions& options) {
  return error_trace(P, p0, agg, exactness_defect(agg, P), ks, policy, options);
}

ErrorTrace error_trace(const StochasticMatrix& P, const Distribution& p0, const Aggregation& agg,
                       const DenseMatrix& defect, const std::vector<std::size_t>& ks,
                       const NormalizationPolicy& policy, const TraceOptions& options) {
  if (p0.size() != P.n()) throw DimensionMismatch(P.n(), p0.size(), "initial vector");
  if (agg.n() != P.n()) throw DimensionMismatch(P.n(), agg.n(), "disaggregation matrix columns");
  if (agg.pi0.size() != agg.size())
    throw DimensionMismatch(agg.size(), agg.pi0.size(), "aggregated initial vector");
  if (defect.rows() != agg.size() || defect.cols() != P.n())
    throw DimensionMismatch(agg.size() * P.n(), defect.size(), "exactness defect");
  if (!std::is_sorted(ks.begin(), ks.end())) throw InvalidArgument("step list must be ascending");

  ErrorTrace trace;
  trace.static_error = inf_norm(defect);
  const Vector defect_rows = abs_row_sums(defect);
  const double pi_norm = inf_norm(agg.Pi);
  const double pi0_norm1 = agg.pi0.lpNorm<1>();

  Vector p = p0.values(), p_next(P.n());
  Vector pi = agg.pi0, pi_next(agg.size());
  Vector approx(P.n());
  const DenseMatrix At = agg.A.transpose();
  auto error_now = [&] {
    approx.noalias() = At * pi;
    if (policy.mode == NormalizationMode::Never) return (approx - p).lpNorm<1>();
    return (normalize(approx, policy) - p).lpNorm<1>();
  };

  const double e0 = (At * agg.pi0 - p0.values()).lpNorm<1>();
  double accumulated = e0;
  std::size_t k = 0;
  trace.steps.reserve(ks.size());
  trace.e_k.reserve(ks.size());
  for (const std::size_t target : ks) {
    while (k < target) {
      if (options.bounds) accumulated += pi.cwiseAbs().dot(defect_rows);
      P.left_multiply(p, p_next);
      p.swap(p_next);
      pi_next.noalias() = agg.Pi.transpose() * pi;
      pi.swap(pi_next);
      ++k;
    }
    trace.steps.push_back(k);
    trace.e_k.push_back(error_now());
    if (options.bounds) {
      trace.bound_specific.push_back(accumulated);
      trace.bound_general.push_back(general_bound(e0, pi0_norm1, trace.static_error, pi_norm, k));
    }
  }

  if (options.stationary && agg.pi_stationary) {
    trace.criterion = convergence_criterion(agg, defect);
    trace.stationary_residual = stationary_residual(P, agg);
  }
  return trace;
}

void write_trace_csv(const ErrorTrace& trace, std::ostream& out) {
  out << "k,e_k,bound_specific,bound_general\n";
  const bool bounds = trace.bound_specific.size() == trace.steps.size();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out << trace.steps[i] << ',' << format_real(trace.e_k[i]) << ',';
    if (bounds)
      out << format_real(trace.bound_specific[i]) << ',' << format_real(trace.bound_general[i]);
    else
      out << ',';
    out << '\n';
  }
}

double convergence_criterion(const Aggregation& agg, const DenseMatrix& defect) {
  if (!agg.pi_stationary) throw MissingStationary();
  return weighted_abs_row_sums(*agg.pi_stationary, defect);
}

double convergence_criterion(const StochasticMatrix& P, const Aggregation& agg) {
  if (!agg.pi_stationary) throw MissingStationary();
  return convergence_criterion(agg, exactness_defect(agg, P));
}

double stationary_residual(const StochasticMatrix& P, const Aggregation& agg) {
  if (!agg.pi_stationary) throw MissingStationary();
  if (agg.n() != P.n()) throw DimensionMismatch(P.n(), agg.n(), "disaggregation matrix columns");
  const Vector p = agg.A.transpose() * *agg.pi_stationary;
  Vector pP(P.n());
  P.left_multiply(p, pP);
  return (p - pP).lpNorm<1>();
}

Aggregation pipeline_naive(const StochasticMatrix& P, const Distribution& p0, Index size,
                           OrthMethod method) {
  return build_aggregation(arnoldi_iterate(P, p0, size, method), p0);
}

Aggregation pipeline_schur(const StochasticMatrix& P, const Distribution& p0, Index size,
                           OrthMethod method) {
  return aggregated_stationary(pipeline_naive(P, p0, size, method));
}

DynamicResult pipeline_dynamic(const StochasticMatrix& P, const Distribution& p0, Index max_size,
                               double epsilon, Index step_size, OrthMethod method) {
  if (step_size < 1) throw InvalidArgument("step size must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");

  ArnoldiProcess process(P, p0.values(), max_size, method);
  DynamicResult result;
  while (process.can_expand()) {
    process.expand();
    const Index j = process.size();
    if (j % step_size != 0 && j != max_size && !process.deflated()) continue;

    Aggregation agg;
    try {
      agg = aggregated_stationary(build_aggregation(process.snapshot(), p0));
    } catch (const ComplexStationary&) {
      // A complex Ritz pair can lead transiently; only the last check is fatal.
      if (!process.can_expand()) throw;
      result.checks.push_back({j, std::numeric_limits<double>::infinity()});
      continue;
    }
    const double criterion = convergence_criterion(agg, exactness_defect(agg, P));
    result.checks.push_back({j, criterion});
    result.aggregation = std::move(agg);
    result.criterion = criterion;
    result.deflated = process.deflated();
    if (criterion <= epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace arnagg
