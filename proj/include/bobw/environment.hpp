#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bobw/core.hpp"
#include "bobw/rng.hpp"

namespace bobw {

// i.i.d. Bernoulli losses.
struct StochasticBernoulli {
  Vector means;
};

enum class CorruptionRule {
  // For the first floor(C) rounds every optimal arm suffers 1 and every
  // suboptimal arm 0; l_inf corruption of at most 1 per round.
  kFrontLoadedFlip,
};

struct CorruptedStochastic {
  Vector means;
  double budget = 0.0;
  CorruptionRule rule = CorruptionRule::kFrontLoadedFlip;
};

// Row t-1 is the loss vector of round t.
struct AdversarialMatrix {
  Eigen::MatrixXd losses;
};

// Bernoulli losses whose means alternate between two profiles every `period`
// rounds, starting with `first`. 0/1 profiles give a deterministic sequence.
struct SwitchingAdversary {
  std::size_t period = 1;
  Vector first;
  Vector second;
};

using EnvironmentKind =
    std::variant<StochasticBernoulli, CorruptedStochastic, AdversarialMatrix, SwitchingAdversary>;

struct EnvironmentSpec {
  EnvironmentKind kind;
  std::size_t horizon = 0;

  void validate() const;
  std::size_t num_arms() const;
  std::string name() const;
  // Gap vector of the self-bounding condition, when the regime defines one.
  // Switching adversaries have one only if both profiles share their gaps.
  std::optional<GapProfile> gap_profile() const;
  // C of the corrupted regime; 0 for i.i.d.; absent for adversarial regimes.
  std::optional<double> corruption_budget() const;
};

struct RoundLoss {
  LossVector realized;
  std::optional<Vector> expected;
};

// What the environment may see: exploit arms of rounds 1..t-1. The round about
// to be played is not representable.
struct HistoryView {
  std::span<const std::size_t> arms;
  std::size_t next_round() const { return arms.size() + 1; }
};

class Environment {
 public:
  Environment(EnvironmentSpec spec, CounterRng rng);

  // Loss vector of round history.next_round(). Throws HorizonExceeded past T.
  RoundLoss emit_loss(HistoryView history);

  const EnvironmentSpec& spec() const { return spec_; }
  std::size_t num_arms() const { return num_arms_; }
  // Sum over emitted rounds of ||corrupted mean - base mean||_inf.
  double corruption_spent() const { return corruption_spent_; }

 private:
  Vector bernoulli(const Vector& means, std::size_t round) const;

  EnvironmentSpec spec_;
  CounterRng rng_;
  std::size_t num_arms_;
  std::optional<GapProfile> base_profile_;
  double corruption_spent_ = 0.0;
};

// Reads T rows of K comma-separated reals in [0, 1], no header.
Eigen::MatrixXd load_loss_matrix_csv(const std::string& path);

// sum_i counts_i * gap_i.
double pseudo_regret(const GapProfile& profile, std::span<const std::size_t> pull_counts);
// Throws ProfileAbsent for regimes without gaps.
double pseudo_regret(const std::optional<GapProfile>& profile,
                     std::span<const std::size_t> pull_counts);

// sum_t l^t_{choice_t} - min_k sum_t l^t_k over the first choices.size() rows.
double realized_regret(const Eigen::Ref<const Eigen::MatrixXd>& loss_matrix,
                       std::span<const std::size_t> choices);

// Incremental form of realized_regret.
class RealizedRegretTracker {
 public:
  explicit RealizedRegretTracker(std::size_t num_arms)
      : arm_totals_(Vector::Zero(static_cast<Eigen::Index>(num_arms))) {}

  void add(const LossVector& losses, std::size_t choice);
  double regret() const { return learner_total_ - arm_totals_.minCoeff(); }

 private:
  Vector arm_totals_;
  double learner_total_ = 0.0;
};

}  // namespace bobw
