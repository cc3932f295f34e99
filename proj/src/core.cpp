#include "bobw/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bobw {

DistributionCheck validate_distribution(const Eigen::Ref<const Vector>& p) {
  DistributionCheck check;
  if (p.size() == 0) return check;
  check.sum_deviation = std::abs(p.sum() - 1.0);
  check.min_entry = p.minCoeff();
  check.ok = p.allFinite() && check.sum_deviation <= kSimplexTolerance &&
             check.min_entry > 0.0;
  return check;
}

ArmDistribution::ArmDistribution(Vector probs) : probs_(std::move(probs)) {
  const auto check = validate_distribution(probs_);
  if (!check.ok) {
    throw DomainError("not an interior distribution: |sum-1|=" +
                      std::to_string(check.sum_deviation) +
                      " min=" + std::to_string(check.min_entry));
  }
}

ArmDistribution ArmDistribution::uniform(std::size_t num_arms) {
  const auto k = static_cast<Eigen::Index>(num_arms);
  return ArmDistribution(Vector::Constant(k, 1.0 / static_cast<double>(k)));
}

std::size_t ArmDistribution::sample(double u) const {
  double acc = 0.0;
  const auto k = probs_.size();
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    acc += probs_[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(k - 1);
}

LossVector::LossVector(Vector losses) : losses_(std::move(losses)) {
  if (!losses_.allFinite() || (losses_.array() < 0.0).any() ||
      (losses_.array() > 1.0).any()) {
    throw DomainError("loss vector entries must lie in [0, 1]");
  }
}

LossEstimate importance_weighted(std::size_t arm, double observed_loss,
                                 double observation_probability) {
  if (!(observation_probability > 0.0) || observation_probability > 1.0) {
    throw DomainError("observation probability must lie in (0, 1]");
  }
  if (!(observed_loss >= 0.0 && observed_loss <= 1.0)) {
    throw DomainError("observed loss must lie in [0, 1]");
  }
  return {arm, observed_loss / observation_probability};
}

void CumulativeLoss::add(const LossEstimate& estimate) {
  if (estimate.arm >= size()) throw DimensionMismatch("estimate arm out of range");
  totals_[static_cast<Eigen::Index>(estimate.arm)] += estimate.value;
}

GapProfile gap_profile(const Eigen::Ref<const Vector>& means) {
  if (means.size() < 2) throw DomainError("gap profile needs at least two arms");
  if (!means.allFinite() || (means.array() < 0.0).any() || (means.array() > 1.0).any()) {
    throw DomainError("means must lie in [0, 1]");
  }
  GapProfile profile;
  profile.gaps = means.array() - means.minCoeff();
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    if (profile.gaps[i] <= kGapTieTolerance) {
      profile.gaps[i] = 0.0;
      profile.optimal_set.push_back(static_cast<std::size_t>(i));
    } else {
      profile.suboptimal_set.push_back(static_cast<std::size_t>(i));
    }
  }
  if (profile.suboptimal_set.empty()) return profile;

  double delta_min = 1.0;
  double inverse_sum = 0.0;
  for (auto i : profile.suboptimal_set) {
    const double gap = profile.gaps[static_cast<Eigen::Index>(i)];
    delta_min = std::min(delta_min, gap);
    inverse_sum += 1.0 / gap;
  }
  profile.delta_min = delta_min;
  profile.complexity =
      static_cast<double>(profile.optimal_set.size()) / delta_min + inverse_sum;
  return profile;
}

std::optional<double> dee_complexity(const GapProfile& profile) {
  if (!profile.has_suboptimal_arms()) return std::nullopt;
  double total = 0.0;
  for (auto i : profile.suboptimal_set) {
    const double gap = profile.gaps[static_cast<Eigen::Index>(i)];
    total += 1.0 / (gap * gap);
  }
  return total;
}

}  // namespace bobw
