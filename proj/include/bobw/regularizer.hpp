#pragma once

// Coordinate-separable FTRL potentials: log-barrier, beta-Tsallis and shifted
// Shannon entropy, each plus an extra log-barrier -c_log * log(x).
//
// With learning rate gamma the per-coordinate potential is
//   LogBarrier  -(c_log + gamma) log x
//   Tsallis     -c_log log x - gamma x^beta / (1 - beta)
//   Shannon     -c_log log x + gamma x log(x / e)
// All three have a strictly increasing, concave derivative on (0, 1] that
// diverges to -inf at 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bobw/core.hpp"

namespace bobw {

enum class RegularizerKind { kLogBarrier, kTsallis, kShannon };

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::kTsallis;
  double beta = 0.5;  // used by kTsallis only
  double c_log = 0.0;

  static RegularizerSpec log_barrier(double c_log = 0.0) {
    return {RegularizerKind::kLogBarrier, 0.5, c_log};
  }
  static RegularizerSpec tsallis(double beta, double c_log = 0.0) {
    return {RegularizerKind::kTsallis, beta, c_log};
  }
  static RegularizerSpec shannon(double c_log = 0.0) {
    return {RegularizerKind::kShannon, 0.5, c_log};
  }

  void validate() const {
    if (!(c_log >= 0.0) || !std::isfinite(c_log)) {
      throw DomainError("c_log must be a finite nonnegative number");
    }
    if (kind == RegularizerKind::kTsallis && !(beta > 0.0 && beta < 1.0)) {
      throw DomainError("Tsallis beta must lie strictly inside (0, 1)");
    }
  }

  std::string name() const {
    switch (kind) {
      case RegularizerKind::kLogBarrier: return "log-barrier";
      case RegularizerKind::kTsallis: return "tsallis:" + std::to_string(beta);
      case RegularizerKind::kShannon: return "shannon";
    }
    return "unknown";
  }

  friend bool operator==(const RegularizerSpec&, const RegularizerSpec&) = default;
};

template <typename Scalar>
struct CoordinateDerivatives {
  Scalar grad;
  Scalar hess;
};

namespace detail {

template <typename Scalar>
void require_positive(Scalar x, const char* what) {
  if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x))) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// First derivative without argument checks; hot path of the solver.
template <typename Scalar>
Scalar gradient_unchecked(const RegularizerSpec& spec, Scalar gamma, Scalar x) {
  using std::log;
  using std::pow;
  const Scalar c = static_cast<Scalar>(spec.c_log);
  switch (spec.kind) {
    case RegularizerKind::kLogBarrier:
      return -(c + gamma) / x;
    case RegularizerKind::kTsallis: {
      const Scalar b = static_cast<Scalar>(spec.beta);
      return -c / x - gamma * b * pow(x, b - Scalar(1)) / (Scalar(1) - b);
    }
    case RegularizerKind::kShannon:
      return -c / x + gamma * log(x);
  }
  return Scalar(0);
}

template <typename Scalar>
CoordinateDerivatives<Scalar> derivatives_unchecked(const RegularizerSpec& spec,
                                                    Scalar gamma, Scalar x) {
  using std::log;
  using std::pow;
  const Scalar c = static_cast<Scalar>(spec.c_log);
  switch (spec.kind) {
    case RegularizerKind::kLogBarrier:
      return {-(c + gamma) / x, (c + gamma) / (x * x)};
    case RegularizerKind::kTsallis: {
      const Scalar b = static_cast<Scalar>(spec.beta);
      const Scalar xb2 = pow(x, b - Scalar(2));
      return {-c / x - gamma * b * xb2 * x / (Scalar(1) - b),
              c / (x * x) + gamma * b * xb2};
    }
    case RegularizerKind::kShannon:
      return {-c / x + gamma * log(x), c / (x * x) + gamma / x};
  }
  return {Scalar(0), Scalar(1)};
}

// Solution of core'(x) = v for the core term alone (no extra log-barrier).
template <typename Scalar>
Scalar core_inverse(const RegularizerSpec& spec, Scalar gamma, Scalar v) {
  using std::exp;
  using std::pow;
  switch (spec.kind) {
    case RegularizerKind::kLogBarrier:
      return gamma / (-v);
    case RegularizerKind::kTsallis: {
      const Scalar b = static_cast<Scalar>(spec.beta);
      return pow(gamma * b / ((Scalar(1) - b) * (-v)), Scalar(1) / (Scalar(1) - b));
    }
    case RegularizerKind::kShannon:
      return exp(v / gamma);
  }
  return Scalar(0);
}

template <typename Scalar>
struct InverseResult {
  Scalar x;
  int iterations;
};

inline constexpr int kInverseIterationBudget = 200;

// Inverse of the coordinate derivative. Targets at or above phi'(1) map to 1.
template <typename Scalar>
InverseResult<Scalar> inverse_gradient_clamped(const RegularizerSpec& spec,
                                               Scalar gamma, Scalar u) {
  using std::abs;
  using std::max;
  using std::min;
  const Scalar top = gradient_unchecked(spec, gamma, Scalar(1));
  if (u >= top) return {Scalar(1), 0};

  const Scalar c = static_cast<Scalar>(spec.c_log);
  // Closed forms.
  if (spec.kind == RegularizerKind::kLogBarrier) return {(c + gamma) / (-u), 0};
  if (c == Scalar(0)) {
    const Scalar x = core_inverse(spec, gamma, u);
    if (!(x > Scalar(0))) throw OutOfRange("inverse gradient underflows to zero");
    return {x, 0};
  }

  // Both terms are negative and increasing, so the root lies above the
  // single-term solutions at u and below the single-term solutions at u/2.
  Scalar lo = max(c / (-u), core_inverse(spec, gamma, u));
  Scalar hi = min(Scalar(1), max(Scalar(2) * c / (-u), core_inverse(spec, gamma, u / Scalar(2))));
  if (!(lo > Scalar(0))) lo = std::numeric_limits<Scalar>::min();
  if (hi < lo) hi = lo;

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar x = lo;
  for (int it = 1; it <= kInverseIterationBudget; ++it) {
    const auto d = derivatives_unchecked(spec, gamma, x);
    const Scalar g = d.grad - u;
    if (g == Scalar(0)) return {x, it};
    if (g < Scalar(0)) lo = x; else hi = x;
    Scalar next = x - g / d.hess;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    if (abs(next - x) <= Scalar(2) * eps * x || hi - lo <= Scalar(2) * eps * hi) {
      return {next, it};
    }
    x = next;
  }
  throw NonConvergence("inverse gradient: iteration budget exhausted");
}

}  // namespace detail

// Per-coordinate potential value (extra log-barrier included).
template <typename Scalar>
Scalar coord_potential(const RegularizerSpec& spec, Scalar gamma, Scalar x) {
  using std::log;
  using std::pow;
  detail::require_positive(x, "coordinate");
  const Scalar c = static_cast<Scalar>(spec.c_log);
  switch (spec.kind) {
    case RegularizerKind::kLogBarrier:
      return -(c + gamma) * log(x);
    case RegularizerKind::kTsallis: {
      const Scalar b = static_cast<Scalar>(spec.beta);
      return -c * log(x) - gamma * pow(x, b) / (Scalar(1) - b);
    }
    case RegularizerKind::kShannon:
      return -c * log(x) + gamma * x * (log(x) - Scalar(1));
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar potential(const RegularizerSpec& spec, const Eigen::Ref<const VectorX<Scalar>>& gamma,
                 const Eigen::Ref<const VectorX<Scalar>>& p) {
  if (gamma.size() != p.size()) throw DimensionMismatch("potential: gamma and p differ in size");
  Scalar total(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    detail::require_positive(gamma[i], "learning rate");
    total += coord_potential(spec, gamma[i], p[i]);
  }
  return total;
}

template <typename Scalar>
CoordinateDerivatives<Scalar> coord_derivatives(const RegularizerSpec& spec, Scalar gamma,
                                                Scalar x) {
  detail::require_positive(x, "coordinate");
  detail::require_positive(gamma, "learning rate");
  return detail::derivatives_unchecked(spec, gamma, x);
}

// phi'(1): the supremum of the derivative's range on (0, 1].
template <typename Scalar>
Scalar gradient_at_one(const RegularizerSpec& spec, Scalar gamma) {
  return detail::gradient_unchecked(spec, gamma, Scalar(1));
}

// Relative residual accepted by inverse_gradient_coord: 1e-12 in double.
template <typename Scalar>
constexpr Scalar inverse_tolerance() {
  return std::max(Scalar(1e-12), Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

// The unique x in (0, 1) with phi'(x) = u. Throws OutOfRange when u >= phi'(1).
template <typename Scalar>
Scalar inverse_gradient_coord(const RegularizerSpec& spec, Scalar gamma, Scalar u) {
  using std::abs;
  using std::max;
  detail::require_positive(gamma, "learning rate");
  if (!std::isfinite(static_cast<double>(u))) throw DomainError("inverse gradient target is not finite");
  if (u >= gradient_at_one(spec, gamma)) {
    throw OutOfRange("inverse gradient target outside the derivative range on (0, 1)");
  }
  const Scalar x = detail::inverse_gradient_clamped(spec, gamma, u).x;
  const Scalar residual = abs(detail::gradient_unchecked(spec, gamma, x) - u);
  if (residual > inverse_tolerance<Scalar>() * max(Scalar(1), abs(u))) {
    throw NonConvergence("inverse gradient residual above tolerance");
  }
  return x;
}

// Inverse of the coordinate derivative on the whole half-line (0, inf), where
// all three families remain defined. Throws OutOfRange when u is not attained
// (log-barrier and Tsallis derivatives stay negative).
template <typename Scalar>
Scalar inverse_gradient_extended(const RegularizerSpec& spec, Scalar gamma, Scalar u) {
  using std::abs;
  using std::max;
  if (u < detail::gradient_unchecked(spec, gamma, Scalar(1))) {
    return inverse_gradient_coord(spec, gamma, u);
  }
  if (spec.kind != RegularizerKind::kShannon && !(u < Scalar(0))) {
    throw OutOfRange("inverse gradient: target not attained on (0, inf)");
  }
  Scalar lo = Scalar(1), hi = Scalar(2);
  while (detail::gradient_unchecked(spec, gamma, hi) < u) {
    lo = hi;
    hi *= Scalar(2);
    if (!(hi < std::numeric_limits<Scalar>::max() / Scalar(4))) {
      throw OutOfRange("inverse gradient: target beyond representable range");
    }
  }
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar x = Scalar(0.5) * (lo + hi);
  for (int it = 0; it < detail::kInverseIterationBudget; ++it) {
    const auto d = detail::derivatives_unchecked(spec, gamma, x);
    const Scalar g = d.grad - u;
    if (g == Scalar(0)) return x;
    if (g < Scalar(0)) lo = x; else hi = x;
    Scalar next = x - g / d.hess;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    if (abs(next - x) <= Scalar(2) * eps * x || hi - lo <= Scalar(2) * eps * hi) {
      x = next;
      break;
    }
    x = next;
  }
  const Scalar residual = abs(detail::gradient_unchecked(spec, gamma, x) - u);
  if (residual > inverse_tolerance<Scalar>() * max(Scalar(1), abs(u))) {
    throw NonConvergence("inverse gradient residual above tolerance");
  }
  return x;
}

}  // namespace bobw
