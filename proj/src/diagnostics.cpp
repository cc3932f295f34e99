#include "bobw/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace bobw {

StabilityReport check_stability(const ArmDistribution& prev, const ArmDistribution& next,
                                std::size_t round) {
  if (prev.size() != next.size()) throw DimensionMismatch("stability: sizes differ");
  const Vector ratio = next.probs().array() / prev.probs().array();
  StabilityReport report;
  report.round = round;
  report.worst_ratio_low = ratio.minCoeff();
  report.worst_ratio_high = ratio.maxCoeff();
  report.violated = report.worst_ratio_low < 0.5 || report.worst_ratio_high > 2.0;
  return report;
}

SelfBoundingTrace::SelfBoundingTrace(std::vector<std::size_t> suboptimal_arms)
    : arms_(std::move(suboptimal_arms)),
      per_arm_cum_(Vector::Zero(static_cast<Eigen::Index>(arms_.size()))) {}

void SelfBoundingTrace::add(const Vector& probs) {
  for (std::size_t j = 0; j < arms_.size(); ++j) {
    if (arms_[j] >= static_cast<std::size_t>(probs.size())) {
      throw DimensionMismatch("self-bounding trace: arm outside distribution");
    }
    const double p = probs[static_cast<Eigen::Index>(arms_[j])];
    per_arm_cum_[static_cast<Eigen::Index>(j)] += p;
    cum_v_prob_ += p;
  }
}

SelfBoundingValues self_bounding_values(const SelfBoundingTrace& trace, double x) {
  if (!(x > 0.0)) throw DomainError("self-bounding scale must be positive");
  SelfBoundingValues values;
  values.s1 = std::sqrt(x * trace.cum_v_prob());
  values.s2 = (x * trace.per_arm_cum().array()).sqrt().sum();
  return values;
}

double skewed_bregman(const CoordinatePotential& f_t, const CoordinatePotential& f_next, double u,
                      double v) {
  for (const double z : {u, v}) {
    if (!(z > 0.0 && z <= 1.0)) throw DomainError("skewed Bregman arguments must lie in (0, 1]");
  }
  return f_t.value(u) - f_next.value(v) - (u - v) * f_next.gradient(v);
}

namespace {
// The probe's solutions may leave (0, 1]; the potentials are defined beyond it.
double divergence_unchecked(const CoordinatePotential& f_t, const CoordinatePotential& f_next,
                            double u, double v) {
  return f_t.value(u) - f_next.value(v) - (u - v) * f_next.gradient(v);
}
}  // namespace

MonotonicityProbe monotonicity_probe(const CoordinatePotential& f_t,
                                     const CoordinatePotential& f_next, double x, double m,
                                     double xi) {
  if (f_t.spec.kind != f_next.spec.kind ||
      (f_t.spec.kind == RegularizerKind::kTsallis && f_t.spec.beta != f_next.spec.beta)) {
    throw ConfigError("monotonicity probe: potentials must share a family");
  }
  if (f_next.gamma < f_t.gamma || f_next.spec.c_log < f_t.spec.c_log) {
    throw ConfigError("monotonicity probe: next potential must not have a smaller derivative");
  }
  if (!(x > 0.0 && m <= 1.0 && x <= m)) throw DomainError("monotonicity probe needs 0 < x <= m <= 1");

  MonotonicityProbe probe;
  probe.y = inverse_gradient_extended(f_next.spec, f_next.gamma, f_t.gradient(x) + xi);
  probe.n = x == m ? probe.y
                   : inverse_gradient_extended(f_next.spec, f_next.gamma, f_t.gradient(m) + xi);
  probe.lhs = divergence_unchecked(f_t, f_next, x, probe.y);
  probe.rhs = divergence_unchecked(f_t, f_next, m, probe.n);
  probe.holds = probe.lhs <= probe.rhs + kInequalitySlack;
  return probe;
}

Lemma2Result lemma2_check(std::span<const double> xs, double alpha) {
  const double exponent = 1.0 - 2.0 * alpha;
  double running = 0.0;
  double total = 0.0;
  Lemma2Result result;
  for (const double x : xs) {
    if (!(x > 0.0)) throw DomainError("lemma2_check needs a positive sequence");
    running += std::pow(x, exponent);
    total += x;
    result.lhs += std::pow(x, 1.0 - alpha) / std::sqrt(1.0 + running);
  }
  result.rhs = 2.0 * std::sqrt(total * std::log1p(running));
  result.holds = result.lhs <= result.rhs + kInequalitySlack;
  return result;
}

ConjectureAccumulator::ConjectureAccumulator(std::size_t num_arms, double beta,
                                             std::size_t horizon)
    : beta_(beta),
      floor_(1.0 / static_cast<double>(horizon)),
      sums_(Vector::Zero(static_cast<Eigen::Index>(num_arms))) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("conjecture probe needs beta in (0, 1)");
  if (horizon < 1) throw DomainError("conjecture probe needs a positive horizon");
}

void ConjectureAccumulator::add(const Vector& probs) {
  if (probs.size() != sums_.size()) throw DimensionMismatch("conjecture probe: size");
  for (Eigen::Index i = 0; i < sums_.size(); ++i) {
    sums_[i] += std::pow(std::max(probs[i], floor_), 1.0 - 2.0 * beta_);
    value_ += std::pow(probs[i], 1.0 - beta_) / std::sqrt(1.0 + sums_[i]);
  }
  ++rounds_;
}

double ConjectureAccumulator::reference() const {
  return std::sqrt(static_cast<double>(sums_.size()) * static_cast<double>(rounds_));
}

double conjecture_probe(std::span<const ArmDistribution> history, double beta,
                        std::size_t horizon) {
  if (history.empty()) throw DomainError("conjecture probe needs a nonempty history");
  ConjectureAccumulator acc(history.front().size(), beta, horizon);
  for (const auto& p : history) acc.add(p.probs());
  return acc.value();
}

}  // namespace bobw
