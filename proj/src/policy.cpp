#include "bobw/policy.hpp"

#include <cmath>

#include "bobw/solver.hpp"

namespace bobw {

namespace {

constexpr double kLogBarrierScale = 162.0;

double inverse_sqrt_log_horizon(std::size_t horizon) {
  if (horizon < 3) throw ConfigError("horizon must be at least 3 for theta = 1/sqrt(log T)");
  return std::sqrt(1.0 / std::log(static_cast<double>(horizon)));
}

}  // namespace

AlgoConfig AlgoConfig::log_barrier(std::size_t horizon) {
  return {RegularizerSpec::log_barrier(kLogBarrierScale), 0.0,
          inverse_sqrt_log_horizon(horizon), horizon, ExplorationMode::kCoupled};
}

AlgoConfig AlgoConfig::tsallis(double beta, std::size_t horizon) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("Tsallis beta must lie in (0, 1)");
  return {RegularizerSpec::tsallis(beta, kLogBarrierScale * beta / (1.0 - beta)), beta,
          std::sqrt((1.0 - beta) / beta), horizon, ExplorationMode::kCoupled};
}

AlgoConfig AlgoConfig::shannon(std::size_t num_arms, std::size_t horizon) {
  return {RegularizerSpec::shannon(kLogBarrierScale * std::log(static_cast<double>(num_arms))),
          1.0, inverse_sqrt_log_horizon(horizon), horizon, ExplorationMode::kCoupled};
}

AlgoConfig AlgoConfig::decoupled(std::size_t num_arms, std::size_t horizon) {
  return {RegularizerSpec::tsallis(2.0 / 3.0, 0.0), 0.5,
          std::pow(static_cast<double>(num_arms), 1.0 / 6.0), horizon,
          ExplorationMode::kDecoupled};
}

AlgoConfig AlgoConfig::preset(const std::string& name, std::size_t num_arms,
                              std::size_t horizon) {
  if (name == "log-barrier") return log_barrier(horizon);
  if (name == "shannon") return shannon(num_arms, horizon);
  if (name == "dee") return decoupled(num_arms, horizon);
  if (name.rfind("tsallis:", 0) == 0) {
    const std::string value = name.substr(8);
    std::size_t used = 0;
    double beta = 0.0;
    try {
      beta = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ConfigError("bad Tsallis preset: " + name);
    return tsallis(beta, horizon);
  }
  throw ConfigError("unknown preset: " + name);
}

void AlgoConfig::validate() const {
  try {
    regularizer.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("theta must be positive");
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (mode == ExplorationMode::kDecoupled &&
      !(regularizer.kind == RegularizerKind::kTsallis &&
        std::abs(regularizer.beta - 2.0 / 3.0) < 1e-12)) {
    throw ConfigError("decoupled mode is defined for 2/3-Tsallis only");
  }
}

void LearningRateState::accumulate(const Vector& probs, double alpha, std::size_t horizon) {
  if (probs.size() != sums_.size()) throw DimensionMismatch("learning-rate update size");
  const double floor = 1.0 / static_cast<double>(horizon);
  const double exponent = 1.0 - 2.0 * alpha;
  for (Eigen::Index i = 0; i < sums_.size(); ++i) {
    sums_[i] += std::pow(std::max(probs[i], floor), exponent);
  }
}

Vector learning_rates(const LearningRateState& state, double theta) {
  return theta * (1.0 + state.sums().array()).sqrt();
}

Vector exploration_distribution(const Vector& probs) {
  Vector g = probs.array().pow(kDecoupledExplorationExponent);
  return g / g.sum();
}

LossEstimate estimate_loss(const RoundAction& action, ExplorationMode mode, double loss) {
  if (mode == ExplorationMode::kCoupled) {
    return importance_weighted(action.exploit_arm, loss, action.distribution[action.exploit_arm]);
  }
  return importance_weighted(action.explore_arm, loss, action.exploration[action.explore_arm]);
}

FtrlPolicy::FtrlPolicy(AlgoConfig config, std::size_t num_arms, CounterRng rng)
    : config_(config), num_arms_(num_arms), rng_(rng), cumulative_(num_arms), lr_(num_arms) {
  config_.validate();
  if (num_arms < 2) throw ConfigError("need at least two arms");
}

RoundAction FtrlPolicy::next_distribution() {
  if (round_ > config_.horizon) throw HorizonExceeded("policy: horizon exceeded");
  const Vector gamma = current_rates();
  SolveResult<double> solved;
  try {
    solved = ftrl_argmin<double>(config_.regularizer, gamma, cumulative_.totals(), warm_multiplier_);
  } catch (NonConvergence& e) {
    e.set_round(round_);
    throw;
  }
  warm_multiplier_ = solved.multiplier;

  RoundAction action;
  action.round = round_;
  action.distribution = solved.distribution();
  action.solver_iterations = solved.iterations;
  action.solver_residual = solved.kkt_residual;
  action.exploit_arm = action.distribution.sample(rng_.uniform(round_, DrawPurpose::kExploit));
  if (config_.mode == ExplorationMode::kCoupled) {
    action.exploration = action.distribution;
    action.explore_arm = action.exploit_arm;
  } else {
    action.exploration = ArmDistribution(exploration_distribution(action.distribution.probs()));
    action.explore_arm = action.exploration.sample(rng_.uniform(round_, DrawPurpose::kExplore));
  }
  return action;
}

void FtrlPolicy::observe(const RoundAction& action, double loss) {
  if (action.round != round_) throw DomainError("observe: action belongs to another round");
  cumulative_.add(estimate_loss(action, config_.mode, loss));
  lr_.accumulate(action.distribution.probs(), config_.alpha, config_.horizon);
  last_distribution_ = action.distribution;
  ++round_;
}

}  // namespace bobw
