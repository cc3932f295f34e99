#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "bobw/core.hpp"
#include "bobw/regularizer.hpp"
#include "bobw/rng.hpp"

namespace bobw {

enum class ExplorationMode { kCoupled, kDecoupled };

// Algorithm parameters. Presets reproduce the published parameterizations.
struct AlgoConfig {
  RegularizerSpec regularizer;
  double alpha = 0.5;
  double theta = 1.0;
  std::size_t horizon = 0;
  ExplorationMode mode = ExplorationMode::kCoupled;

  // c_log = 162, alpha = 0, theta = sqrt(1 / log T). Requires T >= 3.
  static AlgoConfig log_barrier(std::size_t horizon);
  // c_log = 162 beta / (1 - beta), alpha = beta, theta = sqrt((1 - beta) / beta).
  static AlgoConfig tsallis(double beta, std::size_t horizon);
  // c_log = 162 log K, alpha = 1, theta = sqrt(1 / log T). Requires T >= 3.
  static AlgoConfig shannon(std::size_t num_arms, std::size_t horizon);
  // Decoupled-Tsallis-INF: beta = 2/3, c_log = 0, theta = K^(1/6), alpha = 1/2.
  static AlgoConfig decoupled(std::size_t num_arms, std::size_t horizon);

  // "log-barrier", "tsallis:<beta>", "shannon" or "dee".
  static AlgoConfig preset(const std::string& name, std::size_t num_arms, std::size_t horizon);

  void validate() const;
};

inline constexpr double kDecoupledExplorationExponent = 2.0 / 3.0;

class LearningRateState {
 public:
  LearningRateState() = default;
  explicit LearningRateState(std::size_t num_arms)
      : sums_(Vector::Zero(static_cast<Eigen::Index>(num_arms))) {}

  // s_i += max(p_i, 1/T)^(1 - 2 alpha) for every arm.
  void accumulate(const Vector& probs, double alpha, std::size_t horizon);

  const Vector& sums() const { return sums_; }

 private:
  Vector sums_;
};

// gamma_i = theta * sqrt(1 + s_i).
Vector learning_rates(const LearningRateState& state, double theta);

// g_i proportional to p_i^(2/3).
Vector exploration_distribution(const Vector& probs);

struct RoundAction {
  std::size_t round = 0;
  std::size_t exploit_arm = 0;
  std::size_t explore_arm = 0;  // equals exploit_arm in coupled mode
  ArmDistribution distribution;
  ArmDistribution exploration;  // equals distribution in coupled mode
  int solver_iterations = 0;
  double solver_residual = 0.0;
};

// Importance-weighted estimate for the arm whose loss was observed.
LossEstimate estimate_loss(const RoundAction& action, ExplorationMode mode, double loss);

// One FTRL learner instance. Single owner; rounds advance sequentially through
// next_distribution() followed by observe().
class FtrlPolicy {
 public:
  FtrlPolicy(AlgoConfig config, std::size_t num_arms, CounterRng rng);

  // Throws HorizonExceeded once T rounds have been observed.
  RoundAction next_distribution();
  void observe(const RoundAction& action, double loss);

  const AlgoConfig& config() const { return config_; }
  std::size_t num_arms() const { return num_arms_; }
  // 1-based index of the round about to be played.
  std::size_t round() const { return round_; }
  const CumulativeLoss& cumulative() const { return cumulative_; }
  const LearningRateState& learning_rate_state() const { return lr_; }
  Vector current_rates() const { return learning_rates(lr_, config_.theta); }
  const std::optional<ArmDistribution>& last_distribution() const { return last_distribution_; }

 private:
  AlgoConfig config_;
  std::size_t num_arms_;
  CounterRng rng_;
  CumulativeLoss cumulative_;
  LearningRateState lr_;
  std::size_t round_ = 1;
  std::optional<ArmDistribution> last_distribution_;
  std::optional<double> warm_multiplier_;
};

}  // namespace bobw
