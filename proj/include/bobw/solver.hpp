#pragma once

// p = argmin_{p in simplex} <p, L> + phi(p) through the stationarity system
//   L_i + phi_i'(p_i) = nu   for all i,   sum_i p_i = 1.
// Each p_i is an increasing convex function of nu (phi_i' is increasing and
// concave), so S(nu) = sum_i p_i(nu) is increasing and convex and Newton's
// method from the right of the root is monotone. Steps that leave the
// current bracket fall back to bisection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bobw/regularizer.hpp"

namespace bobw {

template <typename Scalar>
struct SolveResult {
  VectorX<Scalar> probs;
  Scalar multiplier;  // nu, in the caller's (unshifted) loss coordinates
  int iterations;
  Scalar kkt_residual;  // max_i |L_i + phi_i'(p_i) - nu|

  ArmDistribution distribution() const {
    return ArmDistribution(probs.template cast<double>());
  }
};

inline constexpr int kSolverIterationBudget = 500;
inline constexpr double kSimplexRootTolerance = 1e-12;

namespace detail {

template <typename Scalar>
void check_solver_inputs(const RegularizerSpec& spec,
                         const Eigen::Ref<const VectorX<Scalar>>& gamma,
                         const Eigen::Ref<const VectorX<Scalar>>& losses) {
  spec.validate();
  if (gamma.size() != losses.size()) throw DimensionMismatch("gamma and losses differ in size");
  if (losses.size() < 1) throw DomainError("need at least one arm");
  if (!losses.allFinite() || !gamma.allFinite()) throw DomainError("non-finite solver input");
  if ((gamma.array() <= Scalar(0)).any()) throw DomainError("learning rates must be positive");
}

template <typename Scalar>
Scalar median(std::vector<Scalar> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const Scalar upper = *mid;
  const Scalar lower = *std::max_element(values.begin(), mid);
  return Scalar(0.5) * (lower + upper);
}

}  // namespace detail

// `warm_multiplier` is a previous round's nu; it only seeds the iteration.
template <typename Scalar>
SolveResult<Scalar> ftrl_argmin(const RegularizerSpec& spec,
                                const Eigen::Ref<const VectorX<Scalar>>& gamma,
                                const Eigen::Ref<const VectorX<Scalar>>& losses,
                                std::optional<Scalar> warm_multiplier = std::nullopt) {
  using std::abs;
  using std::max;
  using std::min;
  detail::check_solver_inputs<Scalar>(spec, gamma, losses);

  const Eigen::Index k = losses.size();
  // Shift so that the smallest loss is zero; nu then stays O(phi').
  const Scalar shift = losses.minCoeff();
  const VectorX<Scalar> shifted = losses.array() - shift;

  VectorX<Scalar> probs(k);
  if (k == 1) {
    probs[0] = Scalar(1);
    const Scalar nu = gradient_at_one(spec, gamma[0]);
    return {probs, nu + shift, 0, Scalar(0)};
  }

  const Scalar inv_k = Scalar(1) / static_cast<Scalar>(k);
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi_top = std::numeric_limits<Scalar>::infinity();
  Scalar hi_uniform = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar at_uniform = shifted[i] + detail::gradient_unchecked(spec, gamma[i], inv_k);
    lo = min(lo, at_uniform);
    hi_uniform = max(hi_uniform, at_uniform);
    hi_top = min(hi_top, shifted[i] + gradient_at_one(spec, gamma[i]));
  }
  Scalar hi = min(hi_top, hi_uniform);

  auto evaluate = [&](Scalar nu, Scalar& slope) {
    Scalar total(0);
    slope = Scalar(0);
    for (Eigen::Index i = 0; i < k; ++i) {
      const Scalar x = detail::inverse_gradient_clamped(spec, gamma[i], nu - shifted[i]).x;
      probs[i] = x;
      total += x;
      slope += Scalar(1) / detail::derivatives_unchecked(spec, gamma[i], x).hess;
    }
    return total - Scalar(1);
  };

  Scalar nu = hi;
  if (warm_multiplier) {
    const Scalar warm = *warm_multiplier - shift;
    if (warm > lo && warm < hi) nu = warm;
  }

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar root_tolerance =
      max(Scalar(kSimplexRootTolerance), Scalar(4) * static_cast<Scalar>(k) * eps);
  int iterations = 0;
  Scalar excess(0);
  bool converged = false;
  while (iterations < kSolverIterationBudget) {
    ++iterations;
    Scalar slope;
    excess = evaluate(nu, slope);
    if (abs(excess) <= root_tolerance) {
      converged = true;
      break;
    }
    if (excess < Scalar(0)) lo = nu; else hi = nu;
    if (hi - lo <= Scalar(4) * eps * max(Scalar(1), abs(nu))) {
      converged = abs(excess) <= Scalar(100) * root_tolerance;
      break;
    }
    Scalar next = nu - excess / slope;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    nu = next;
  }
  if (!converged) throw NonConvergence("ftrl_argmin: simplex multiplier did not converge");

  Scalar residual(0);
  for (Eigen::Index i = 0; i < k; ++i) {
    residual = max(residual,
                   abs(shifted[i] + detail::gradient_unchecked(spec, gamma[i], probs[i]) - nu));
  }
  return {probs, nu + shift, iterations, residual};
}

// max_i |s_i - median_j s_j| with s_i = L_i + phi_i'(p_i).
template <typename Scalar>
Scalar kkt_residual(const RegularizerSpec& spec, const Eigen::Ref<const VectorX<Scalar>>& gamma,
                    const Eigen::Ref<const VectorX<Scalar>>& losses,
                    const Eigen::Ref<const VectorX<Scalar>>& probs) {
  using std::abs;
  using std::max;
  detail::check_solver_inputs<Scalar>(spec, gamma, losses);
  if (probs.size() != losses.size()) throw DimensionMismatch("probs and losses differ in size");
  if (!probs.allFinite() || (probs.array() <= Scalar(0)).any()) {
    throw DomainError("kkt_residual needs a strictly positive distribution");
  }
  const Scalar shift = losses.minCoeff();
  std::vector<Scalar> stationarity(static_cast<std::size_t>(losses.size()));
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    stationarity[static_cast<std::size_t>(i)] =
        (losses[i] - shift) + detail::gradient_unchecked(spec, gamma[i], probs[i]);
  }
  const Scalar center = detail::median(stationarity);
  Scalar worst(0);
  for (const Scalar s : stationarity) worst = max(worst, abs(s - center));
  return worst;
}

}  // namespace bobw
