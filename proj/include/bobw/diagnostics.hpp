#pragma once

// Runtime monitors and executable checks of the analysis: multiplicative
// stability, self-bounding quantities, monotonicity of the skewed Bregman
// divergence, the learning-rate summation bound and the open summation
// conjecture for beta-Tsallis.

#include <cstddef>
#include <span>
#include <vector>

#include "bobw/core.hpp"
#include "bobw/regularizer.hpp"

namespace bobw {

inline constexpr double kInequalitySlack = 1e-10;

struct StabilityReport {
  std::size_t round = 0;
  double worst_ratio_low = 1.0;   // min_i next_i / prev_i
  double worst_ratio_high = 1.0;  // max_i next_i / prev_i
  bool violated = false;          // some ratio outside [1/2, 2]
};

StabilityReport check_stability(const ArmDistribution& prev, const ArmDistribution& next,
                                std::size_t round = 0);

// Running sums of suboptimal-arm probabilities.
class SelfBoundingTrace {
 public:
  SelfBoundingTrace() = default;
  explicit SelfBoundingTrace(std::vector<std::size_t> suboptimal_arms);

  void add(const Vector& probs);

  double cum_v_prob() const { return cum_v_prob_; }
  const Vector& per_arm_cum() const { return per_arm_cum_; }
  const std::vector<std::size_t>& arms() const { return arms_; }

 private:
  std::vector<std::size_t> arms_;
  double cum_v_prob_ = 0.0;
  Vector per_arm_cum_;
};

struct SelfBoundingValues {
  double s1 = 0.0;  // sqrt(x * sum_t sum_V p)
  double s2 = 0.0;  // sum_V sqrt(x * sum_t p_i)
};

SelfBoundingValues self_bounding_values(const SelfBoundingTrace& trace, double x);

// One coordinate of phi^t: a regularizer family at a fixed learning rate.
struct CoordinatePotential {
  RegularizerSpec spec;
  double gamma = 1.0;

  double value(double z) const { return coord_potential(spec, gamma, z); }
  double gradient(double z) const { return coord_derivatives(spec, gamma, z).grad; }
};

// f_t(u) - f_next(v) - (u - v) f_next'(v). Throws DomainError outside (0, 1].
double skewed_bregman(const CoordinatePotential& f_t, const CoordinatePotential& f_next,
                      double u, double v);

struct MonotonicityProbe {
  bool holds = false;
  double lhs = 0.0;  // D(x, y)
  double rhs = 0.0;  // D(m, n)
  double y = 0.0;
  double n = 0.0;
};

// Solves f_next'(y) = f_t'(x) + xi and f_next'(n) = f_t'(m) + xi and compares
// D(x, y) with D(m, n). Requires x <= m, the same family for both potentials
// and a nondecreasing learning rate and c_log; throws ConfigError otherwise
// and OutOfRange when a target leaves the invertible range.
MonotonicityProbe monotonicity_probe(const CoordinatePotential& f_t,
                                     const CoordinatePotential& f_next, double x, double m,
                                     double xi);

struct Lemma2Result {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// lhs = sum_t x_t^(1-a) / sqrt(1 + sum_{s<=t} x_s^(1-2a)),
// rhs = 2 sqrt(sum_t x_t * log(1 + sum_t x_t^(1-2a))).
Lemma2Result lemma2_check(std::span<const double> xs, double alpha);

// sum_i sum_t p_i^(1-b) / sqrt(1 + sum_{s<=t} max(p_i^s, 1/T)^(1-2b)),
// accumulated one distribution at a time.
class ConjectureAccumulator {
 public:
  ConjectureAccumulator(std::size_t num_arms, double beta, std::size_t horizon);

  void add(const Vector& probs);

  double value() const { return value_; }
  std::size_t rounds() const { return rounds_; }
  // sqrt(K t), the conjectured order.
  double reference() const;

 private:
  double beta_;
  double floor_;
  Vector sums_;
  double value_ = 0.0;
  std::size_t rounds_ = 0;
};

double conjecture_probe(std::span<const ArmDistribution> history, double beta,
                        std::size_t horizon);

}  // namespace bobw
