#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bobw/errors.hpp"

namespace bobw {

using Vector = Eigen::VectorXd;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kSimplexTolerance = 1e-9;
// Gaps at or below this are treated as exact ties.
inline constexpr double kGapTieTolerance = 1e-12;

struct DistributionCheck {
  bool ok = false;
  double sum_deviation = 0.0;  // |sum(p) - 1|
  double min_entry = 0.0;
};

DistributionCheck validate_distribution(const Eigen::Ref<const Vector>& p);

// A strictly positive probability vector over K arms.
class ArmDistribution {
 public:
  ArmDistribution() = default;
  // Throws DomainError unless validate_distribution(probs).ok.
  explicit ArmDistribution(Vector probs);

  static ArmDistribution uniform(std::size_t num_arms);

  const Vector& probs() const { return probs_; }
  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  double operator[](std::size_t i) const { return probs_[static_cast<Eigen::Index>(i)]; }

  // Inverse-CDF draw for u in [0, 1).
  std::size_t sample(double u) const;

 private:
  Vector probs_;
};

// One round's loss vector, every entry in [0, 1].
class LossVector {
 public:
  LossVector() = default;
  explicit LossVector(Vector losses);

  const Vector& values() const { return losses_; }
  std::size_t size() const { return static_cast<std::size_t>(losses_.size()); }
  double operator[](std::size_t i) const { return losses_[static_cast<Eigen::Index>(i)]; }

 private:
  Vector losses_;
};

// Importance-weighted estimate; the only nonzero coordinate is `arm`.
struct LossEstimate {
  std::size_t arm = 0;
  double value = 0.0;
};

LossEstimate importance_weighted(std::size_t arm, double observed_loss,
                                 double observation_probability);

class CumulativeLoss {
 public:
  CumulativeLoss() = default;
  explicit CumulativeLoss(std::size_t num_arms) : totals_(Vector::Zero(static_cast<Eigen::Index>(num_arms))) {}

  void add(const LossEstimate& estimate);
  const Vector& totals() const { return totals_; }
  std::size_t size() const { return static_cast<std::size_t>(totals_.size()); }

 private:
  Vector totals_;
};

struct GapProfile {
  Vector gaps;
  std::vector<std::size_t> optimal_set;     // U
  std::vector<std::size_t> suboptimal_set;  // V
  std::optional<double> delta_min;          // absent when V is empty
  std::optional<double> complexity;         // |U|/delta_min + sum_V 1/gap

  bool has_suboptimal_arms() const { return !suboptimal_set.empty(); }
  std::size_t size() const { return static_cast<std::size_t>(gaps.size()); }
};

// Requires K >= 2 and means in [0, 1]; throws DomainError otherwise. An
// all-equal instance is valid and yields a profile without complexity.
GapProfile gap_profile(const Eigen::Ref<const Vector>& means);

// sum over V of 1/gap^2; absent when V is empty.
std::optional<double> dee_complexity(const GapProfile& profile);

}  // namespace bobw
