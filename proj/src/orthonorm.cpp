#include "arnagg/orthonorm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace arnagg {
namespace {

void classical_pass(Eigen::Ref<Vector> r, std::span<const Vector> basis, Eigen::Ref<Vector> h,
                    Eigen::Ref<Vector> scratch) {
  const auto m = static_cast<Index>(basis.size());
  for (Index i = 0; i < m; ++i) scratch[i] = basis[static_cast<std::size_t>(i)].dot(r);
  for (Index i = 0; i < m; ++i) r.noalias() -= scratch[i] * basis[static_cast<std::size_t>(i)];
  h.head(m) += scratch.head(m);
}

void modified_pass(Eigen::Ref<Vector> r, std::span<const Vector> basis, Eigen::Ref<Vector> h) {
  const auto m = static_cast<Index>(basis.size());
  for (Index i = 0; i < m; ++i) {
    const Vector& q = basis[static_cast<std::size_t>(i)];
    const double c = q.dot(r);
    r.noalias() -= c * q;
    h[i] += c;
  }
}

}  // namespace

OrthMethod::OrthMethod(OrthVariant v, double kappa) : variant(v), reorth_threshold(kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw InvalidArgument("reorthogonalization threshold must lie in (0, 1), got " +
                          std::to_string(kappa));
}

bool OrthMethod::classical() const noexcept {
  return variant == OrthVariant::CGS || variant == OrthVariant::CGS2 ||
         variant == OrthVariant::CGSIR;
}

OrthVariant parse_orth_variant(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "cgs") return OrthVariant::CGS;
  if (key == "mgs") return OrthVariant::MGS;
  if (key == "cgs2") return OrthVariant::CGS2;
  if (key == "mgs2") return OrthVariant::MGS2;
  if (key == "cgsir") return OrthVariant::CGSIR;
  if (key == "mgsir") return OrthVariant::MGSIR;
  throw InvalidArgument("unknown orthogonalization method '" + std::string(name) + "'");
}

std::string to_string(OrthVariant variant) {
  switch (variant) {
    case OrthVariant::CGS: return "cgs";
    case OrthVariant::MGS: return "mgs";
    case OrthVariant::CGS2: return "cgs2";
    case OrthVariant::MGS2: return "mgs2";
    case OrthVariant::CGSIR: return "cgsir";
    case OrthVariant::MGSIR: return "mgsir";
  }
  return "unknown";
}

double orthogonalize_in_place(Eigen::Ref<Vector> r, std::span<const Vector> basis,
                              const OrthMethod& method, Eigen::Ref<Vector> h,
                              Eigen::Ref<Vector> scratch) {
  if (r.size() == 0) throw EmptyInput("orthogonalization input");
  const auto m = static_cast<Index>(basis.size());
  if (h.size() < m) throw DimensionMismatch(m, h.size(), "coefficient buffer");
  if (scratch.size() < m) throw DimensionMismatch(m, scratch.size(), "scratch buffer");
  for (const Vector& q : basis)
    if (q.size() != r.size()) throw DimensionMismatch(r.size(), q.size(), "basis vector");

  h.head(m).setZero();
  const bool classical = method.classical();
  auto pass = [&] {
    if (classical)
      classical_pass(r, basis, h, scratch);
    else
      modified_pass(r, basis, h);
  };

  const double input_norm = r.norm();
  pass();
  double norm = r.norm();
  switch (method.variant) {
    case OrthVariant::CGS2:
    case OrthVariant::MGS2:
      pass();
      norm = r.norm();
      break;
    case OrthVariant::CGSIR:
    case OrthVariant::MGSIR:
      if (norm < method.reorth_threshold * input_norm) {
        pass();
        norm = r.norm();
      }
      break;
    default:
      break;
  }
  return norm;
}

OrthStepResult orthogonalize_step(const Eigen::Ref<const Vector>& v, std::span<const Vector> basis,
                                  const OrthMethod& method) {
  OrthStepResult out;
  out.residual = v;
  out.coefficients = Vector::Zero(static_cast<Index>(basis.size()));
  Vector scratch(static_cast<Index>(basis.size()));
  out.residual_norm = orthogonalize_in_place(out.residual, basis, method, out.coefficients, scratch);
  return out;
}

OrthonormalBasis orthonormalize_all(std::span<const Vector> vectors, const OrthMethod& method) {
  OrthonormalBasis out;
  const auto m = static_cast<Index>(vectors.size());
  out.R = DenseMatrix::Zero(m, m);
  out.basis.reserve(vectors.size());
  Vector h(m), scratch(m);
  for (Index i = 0; i < m; ++i) {
    const Vector& v = vectors[static_cast<std::size_t>(i)];
    if (i > 0 && v.size() != vectors.front().size())
      throw DimensionMismatch(vectors.front().size(), v.size(), "input vector");
    Vector r = v;
    const double norm = orthogonalize_in_place(
        r, std::span<const Vector>(out.basis.data(), out.basis.size()), method, h, scratch);
    if (!(norm > kRankTolerance * v.norm())) throw RankDeficient(static_cast<std::size_t>(i));
    out.R.col(i).head(i) = h.head(i);
    out.R(i, i) = norm;
    out.basis.push_back(r / norm);
  }
  return out;
}

double orthogonality_loss(std::span<const Vector> basis) {
  double loss = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      loss = std::max(loss, std::abs(basis[i].dot(basis[j]) - target));
    }
  return loss;
}

}  // namespace arnagg
