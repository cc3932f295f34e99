#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bobw/diagnostics.hpp"
#include "bobw/environment.hpp"
#include "bobw/policy.hpp"
#include "bobw/solver.hpp"
#include "primal_oracle.hpp"

namespace bobw::verify {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

struct Family {
  std::string name;
  RegularizerSpec spec;
};

// log-barrier, Tsallis beta in {0.2, 0.5, 0.8}, shifted Shannon.
std::vector<Family> families(double c_log) {
  return {{"log-barrier", RegularizerSpec::log_barrier(c_log)},
          {"tsallis:0.2", RegularizerSpec::tsallis(0.2, c_log)},
          {"tsallis:0.5", RegularizerSpec::tsallis(0.5, c_log)},
          {"tsallis:0.8", RegularizerSpec::tsallis(0.8, c_log)},
          {"shannon", RegularizerSpec::shannon(c_log)}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

RegularizerSpec random_spec(Rng& rng, RegularizerKind kind) {
  const double c = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? 0.0 : 162.0;
  switch (kind) {
    case RegularizerKind::kLogBarrier: return RegularizerSpec::log_barrier(c);
    case RegularizerKind::kTsallis: return RegularizerSpec::tsallis(uniform(rng, 0.2, 0.8), c);
    case RegularizerKind::kShannon: return RegularizerSpec::shannon(c);
  }
  return {};
}

struct Instance {
  RegularizerSpec spec;
  Vector gamma;
  Vector losses;
};

Instance random_instance(Rng& rng, RegularizerKind kind) {
  static constexpr int kSizes[] = {2, 3, 5};
  const int k = kSizes[std::uniform_int_distribution<int>(0, 2)(rng)];
  Instance inst{random_spec(rng, kind), Vector(k), Vector(k)};
  for (int i = 0; i < k; ++i) {
    inst.losses[i] = uniform(rng, 0.0, 50.0);
    inst.gamma[i] = uniform(rng, 0.5, 50.0);
  }
  return inst;
}

constexpr RegularizerKind kKinds[] = {RegularizerKind::kLogBarrier, RegularizerKind::kTsallis,
                                      RegularizerKind::kShannon};

}  // namespace

CheckResult solver_oracle_equivalence(int instances_per_kind, std::uint64_t seed) {
  Rng rng(seed);
  double worst_gap = 0.0;
  double worst_kkt = 0.0;
  int failures = 0;
  for (const auto kind : kKinds) {
    for (int n = 0; n < instances_per_kind; ++n) {
      const Instance inst = random_instance(rng, kind);
      const auto solved = ftrl_argmin<double>(inst.spec, inst.gamma, inst.losses);
      const auto reference = oracle::projected_newton_argmin(inst.spec, inst.gamma, inst.losses);
      const double gap = (solved.probs - reference.probs).lpNorm<Eigen::Infinity>();
      const double kkt = kkt_residual<double>(inst.spec, inst.gamma, inst.losses, solved.probs);
      worst_gap = std::max(worst_gap, gap);
      worst_kkt = std::max(worst_kkt, kkt);
      if (gap > 1e-6 || kkt > 1e-9) ++failures;
    }
  }
  return {"solver_oracle_equivalence", failures == 0,
          std::to_string(3 * instances_per_kind) + " instances, max L-inf gap " + fmt(worst_gap) +
              ", max KKT residual " + fmt(worst_kkt) + ", failures " + std::to_string(failures)};
}

CheckResult solver_shift_invariance(int instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n = 0; n < instances; ++n) {
    const Instance inst = random_instance(rng, kKinds[n % 3]);
    const double shift = uniform(rng, -100.0, 100.0);
    const auto a = ftrl_argmin<double>(inst.spec, inst.gamma, inst.losses);
    const Vector shifted = inst.losses.array() + shift;
    const auto b = ftrl_argmin<double>(inst.spec, inst.gamma, shifted);
    worst = std::max(worst, (a.probs - b.probs).lpNorm<Eigen::Infinity>());
  }
  return {"solver_shift_invariance", worst <= 1e-10, "max |p - p_shifted| " + fmt(worst)};
}

CheckResult solver_monotone_response(int instances, std::uint64_t seed) {
  Rng rng(seed);
  int failures = 0;
  for (int n = 0; n < instances; ++n) {
    const Instance inst = random_instance(rng, kKinds[n % 3]);
    const auto j = static_cast<Eigen::Index>(
        std::uniform_int_distribution<int>(0, static_cast<int>(inst.losses.size()) - 1)(rng));
    Vector bumped = inst.losses;
    bumped[j] += 0.1;
    const auto a = ftrl_argmin<double>(inst.spec, inst.gamma, inst.losses);
    const auto b = ftrl_argmin<double>(inst.spec, inst.gamma, bumped);
    bool ok = b.probs[j] < a.probs[j];
    for (Eigen::Index i = 0; i < a.probs.size(); ++i) {
      if (i != j && b.probs[i] < a.probs[i] - 1e-15) ok = false;
    }
    if (!ok) ++failures;
  }
  return {"solver_monotone_response", failures == 0,
          std::to_string(instances) + " bumps, failures " + std::to_string(failures)};
}

CheckResult solver_warm_start(int instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n = 0; n < instances; ++n) {
    const Instance inst = random_instance(rng, kKinds[n % 3]);
    const auto previous = ftrl_argmin<double>(inst.spec, inst.gamma, inst.losses);
    Vector next = inst.losses;
    next[0] += uniform(rng, 0.0, 5.0);
    const auto cold = ftrl_argmin<double>(inst.spec, inst.gamma, next);
    const auto warm = ftrl_argmin<double>(inst.spec, inst.gamma, next, previous.multiplier);
    worst = std::max(worst, (cold.probs - warm.probs).lpNorm<Eigen::Infinity>());
  }
  return {"solver_warm_start", worst <= 1e-9, "max |cold - warm| " + fmt(worst)};
}

CheckResult regularizer_round_trip(int draws_per_family, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (const double c : {0.0, 162.0}) {
    for (const auto& family : families(c)) {
      for (int n = 0; n < draws_per_family; ++n) {
        const double gamma = log_uniform(rng, 0.1, 1e3);
        const double x = log_uniform(rng, 1e-8, 1.0 - 1e-6);
        const double u = coord_derivatives(family.spec, gamma, x).grad;
        const double back = inverse_gradient_coord(family.spec, gamma, u);
        worst = std::max(worst, std::abs(back - x) / x);
      }
    }
  }
  return {"regularizer_round_trip", worst <= 1e-9, "max relative error " + fmt(worst)};
}

CheckResult regularizer_monotone_gradient() {
  int failures = 0;
  for (const double c : {0.0, 162.0}) {
    for (const auto& family : families(c)) {
      for (const double gamma : {0.1, 1.0, 100.0}) {
        double previous = -std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 1000; ++j) {
          const double g = coord_derivatives(family.spec, gamma, j / 1000.0).grad;
          if (!(g > previous)) ++failures;
          previous = g;
        }
      }
    }
  }
  return {"regularizer_monotone_gradient", failures == 0,
          "1000-point grids, failures " + std::to_string(failures)};
}

CheckResult regularizer_finite_differences(int draws_per_family, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (const double c : {0.0, 162.0}) {
    for (const auto& family : families(c)) {
      for (int n = 0; n < draws_per_family; ++n) {
        const double gamma = uniform(rng, 0.1, 10.0);
        const double x = uniform(rng, 0.01, 1.0 - 1e-6);
        const double h = 1e-6 * x;
        const auto d = coord_derivatives(family.spec, gamma, x);
        const double fd_grad = (coord_potential(family.spec, gamma, x + h) -
                                coord_potential(family.spec, gamma, x - h)) / (2.0 * h);
        const double fd_hess = (coord_derivatives(family.spec, gamma, x + h).grad -
                                coord_derivatives(family.spec, gamma, x - h).grad) / (2.0 * h);
        worst = std::max(worst, std::abs(d.grad - fd_grad) / std::max(1.0, std::abs(d.grad)));
        worst = std::max(worst, std::abs(d.hess - fd_hess) / std::max(1.0, std::abs(d.hess)));
      }
    }
  }
  return {"regularizer_finite_differences", worst <= 1e-5, "max scaled error " + fmt(worst)};
}

CheckResult gap_profile_properties(int draws, std::uint64_t seed) {
  Rng rng(seed);
  int failures = 0;
  for (int n = 0; n < draws; ++n) {
    const int k = std::uniform_int_distribution<int>(2, 10)(rng);
    Vector means(k);
    for (int i = 0; i < k; ++i) means[i] = std::round(uniform(rng, 0.0, 0.8) * 8.0) / 8.0;
    const double c = std::round(uniform(rng, 0.0, 0.2) * 8.0) / 8.0;
    const auto a = gap_profile(means);
    const auto b = gap_profile((means.array() + c).matrix());
    bool ok = a.optimal_set == b.optimal_set && a.suboptimal_set == b.suboptimal_set &&
              (a.gaps - b.gaps).cwiseAbs().maxCoeff() <= 1e-12;
    if (a.complexity) {
      ok = ok && b.complexity && std::abs(*a.complexity - *b.complexity) <= 1e-12 * *a.complexity;
      const double kmax = static_cast<double>(k) / a.gaps.maxCoeff();
      const double u_term = static_cast<double>(a.optimal_set.size()) / *a.delta_min;
      ok = ok && *a.complexity >= kmax * (1 - 1e-12) && *a.complexity >= u_term;
    } else {
      ok = ok && !b.complexity;
    }
    if (!ok) ++failures;
  }
  return {"gap_profile_properties", failures == 0,
          std::to_string(draws) + " draws, failures " + std::to_string(failures)};
}

CheckResult learning_rate_properties(std::size_t horizon) {
  constexpr std::size_t kArms = 4;
  Vector means(kArms);
  means << 0.5, 0.5, 0.6, 0.8;
  int failures = 0;
  double worst_exact = 0.0;
  for (const std::string name : {"log-barrier", "tsallis:0.3", "tsallis:0.5", "tsallis:0.7", "shannon", "dee"}) {
    const auto config = AlgoConfig::preset(name, kArms, horizon);
    FtrlPolicy policy(config, kArms, CounterRng::derive("lr-properties", 7, name));
    Environment env({StochasticBernoulli{means}, horizon}, CounterRng::derive("lr-properties", 7, "env"));
    std::vector<std::size_t> arms;
    Vector rates = policy.current_rates();
    for (std::size_t t = 1; t <= horizon; ++t) {
      const auto action = policy.next_distribution();
      if (name == "tsallis:0.5" || name == "dee") {
        const double expected = (name == "dee" ? std::pow(static_cast<double>(kArms), 1.0 / 6.0) : 1.0) *
                                std::sqrt(static_cast<double>(t));
        worst_exact = std::max(worst_exact, (rates.array() - expected).abs().maxCoeff());
      }
      const auto loss = env.emit_loss({arms});
      const auto observed = config.mode == ExplorationMode::kCoupled ? action.exploit_arm : action.explore_arm;
      policy.observe(action, loss.realized[observed]);
      arms.push_back(action.exploit_arm);
      const Vector next = policy.current_rates();
      const double floor = 1.0 / static_cast<double>(horizon);
      for (Eigen::Index i = 0; i < next.size(); ++i) {
        const double increment = std::pow(std::max(action.distribution.probs()[i], floor),
                                          1.0 - 2.0 * config.alpha);
        const double bound = config.theta * config.theta * increment / next[i];
        if (next[i] < rates[i] || next[i] - rates[i] > bound + 1e-12) ++failures;
      }
      rates = next;
    }
  }
  return {"learning_rate_properties", failures == 0 && worst_exact <= 1e-12,
          "monotonicity/increment failures " + std::to_string(failures) +
              ", max deviation from closed-form schedule " + fmt(worst_exact)};
}

CheckResult preset_stability(std::size_t horizon, int seeds) {
  constexpr std::size_t kArms = 8;
  Vector means(kArms);
  means << 0.5, 0.5, 0.625, 0.625, 0.625, 0.625, 0.625, 0.625;
  std::size_t violations = 0;
  double low = 1.0, high = 1.0;
  for (const std::string name : {"log-barrier", "tsallis:0.3", "tsallis:0.5", "tsallis:0.7", "shannon"}) {
    for (int s = 0; s < seeds; ++s) {
      const auto config = AlgoConfig::preset(name, kArms, horizon);
      FtrlPolicy policy(config, kArms, CounterRng::derive("stability", static_cast<std::uint64_t>(s), name));
      Environment env({StochasticBernoulli{means}, horizon},
                      CounterRng::derive("stability", static_cast<std::uint64_t>(s), "env"));
      std::vector<std::size_t> arms;
      std::optional<ArmDistribution> previous;
      for (std::size_t t = 1; t <= horizon; ++t) {
        const auto action = policy.next_distribution();
        if (previous) {
          const auto report = check_stability(*previous, action.distribution, t);
          low = std::min(low, report.worst_ratio_low);
          high = std::max(high, report.worst_ratio_high);
          if (report.violated) ++violations;
        }
        previous = action.distribution;
        policy.observe(action, env.emit_loss({arms}).realized[action.exploit_arm]);
        arms.push_back(action.exploit_arm);
      }
    }
  }
  return {"preset_stability", violations == 0,
          "violations " + std::to_string(violations) + ", ratio range [" + fmt(low) + ", " +
              fmt(high) + "]"};
}

CheckResult monotonicity_property(int draws_per_family, std::uint64_t seed) {
  Rng rng(seed);
  int failures = 0;
  int total = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& family : families(0.0)) {
    for (int n = 0; n < draws_per_family; ++n) {
      RegularizerSpec spec = family.spec;
      spec.c_log = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? 0.0 : uniform(rng, 0.0, 10.0);
      const double gamma = uniform(rng, 0.1, 10.0);
      const CoordinatePotential f_t{spec, gamma};
      const CoordinatePotential f_next{spec, gamma + uniform(rng, 0.0, 5.0)};
      double x = uniform(rng, 1e-3, 1.0);
      double m = uniform(rng, 1e-3, 1.0);
      if (x > m) std::swap(x, m);
      // Keep both targets strictly below f_next'(1) so y, n stay in (0, 1).
      const double ceiling = gradient_at_one(f_next.spec, f_next.gamma) - f_t.gradient(m);
      const double spread = 1.0 + std::abs(f_t.gradient(m) - f_t.gradient(x));
      const double xi = ceiling - 1e-9 * spread - uniform(rng, 0.0, 1.0) * spread;
      const auto probe = monotonicity_probe(f_t, f_next, x, m, xi);
      ++total;
      worst_margin = std::min(worst_margin, probe.rhs - probe.lhs);
      if (!probe.holds) ++failures;
    }
  }
  return {"monotonicity_property", failures == 0,
          std::to_string(total) + " draws over 5 families, failures " + std::to_string(failures) +
              ", min rhs-lhs " + fmt(worst_margin)};
}

CheckResult lemma2_property(int sequences_per_alpha, std::uint64_t seed) {
  Rng rng(seed);
  int failures = 0;
  int total = 0;
  double worst_ratio = 0.0;
  for (const double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int n = 0; n < sequences_per_alpha; ++n) {
      const int len = std::uniform_int_distribution<int>(1, 1000)(rng);
      std::vector<double> xs(static_cast<std::size_t>(len));
      const bool log_scale = n % 2 == 1;
      for (auto& x : xs) x = log_scale ? log_uniform(rng, 1e-6, 1.0) : 1.0 - uniform(rng, 0.0, 1.0);
      const auto result = lemma2_check(xs, alpha);
      ++total;
      worst_ratio = std::max(worst_ratio, result.lhs / result.rhs);
      if (!result.holds) ++failures;
    }
  }
  return {"lemma2_property", failures == 0,
          std::to_string(total) + " sequences, failures " + std::to_string(failures) +
              ", max lhs/rhs " + fmt(worst_ratio)};
}

CheckResult bregman_nonnegativity() {
  int failures = 0;
  for (const double c : {0.0, 5.0}) {
    for (const auto& family : families(c)) {
      const CoordinatePotential f{family.spec, 1.5};
      for (int a = 1; a <= 50; ++a) {
        for (int b = 1; b <= 50; ++b) {
          const double u = a / 50.0, v = b / 50.0;
          const double d = skewed_bregman(f, f, u, v);
          if (a == b ? std::abs(d) > 1e-12 : !(d > 0.0)) ++failures;
        }
      }
    }
  }
  return {"bregman_nonnegativity", failures == 0,
          "50x50 grids, failures " + std::to_string(failures)};
}

std::vector<CheckResult> solver_suite() {
  return {solver_oracle_equivalence(200, 20240601), solver_shift_invariance(300, 11),
          solver_monotone_response(300, 12), solver_warm_start(300, 13)};
}

std::vector<CheckResult> invariants_suite() {
  return {regularizer_round_trip(1000, 21), regularizer_monotone_gradient(),
          regularizer_finite_differences(500, 22), gap_profile_properties(500, 23),
          learning_rate_properties(3000), preset_stability(3000, 2)};
}

std::vector<CheckResult> lemmas_suite() {
  return {monotonicity_property(1000, 31), lemma2_property(1000, 32), bregman_nonnegativity()};
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "solver") return solver_suite();
  if (name == "invariants") return invariants_suite();
  if (name == "lemmas") return lemmas_suite();
  throw ConfigError("unknown suite: " + name);
}

}  // namespace bobw::verify
