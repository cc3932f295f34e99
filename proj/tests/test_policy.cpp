#include <doctest.h>

#include <cmath>

#include "bobw/policy.hpp"
#include "verify/suites.hpp"

using bobw::AlgoConfig;
using bobw::ExplorationMode;
using bobw::Vector;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bobw::RoundAction fixed_action(const Vector& p, const Vector& g, std::size_t exploit,
                               std::size_t explore, std::size_t round = 1) {
  bobw::RoundAction a;
  a.round = round;
  a.distribution = bobw::ArmDistribution(p);
  a.exploration = bobw::ArmDistribution(g);
  a.exploit_arm = exploit;
  a.explore_arm = explore;
  return a;
}
}  // namespace

TEST_CASE("preset parameters") {
  const auto lb = AlgoConfig::log_barrier(1000);
  CHECK(lb.regularizer.c_log == 162.0);
  CHECK(lb.alpha == 0.0);
  CHECK(lb.theta == doctest::Approx(1.0 / std::sqrt(std::log(1000.0))));

  const auto ts = AlgoConfig::tsallis(0.3, 1000);
  CHECK(ts.regularizer.c_log == doctest::Approx(162.0 * 0.3 / 0.7));
  CHECK(ts.alpha == 0.3);
  CHECK(ts.theta == doctest::Approx(std::sqrt(0.7 / 0.3)));

  const auto half = AlgoConfig::preset("tsallis:0.5", 4, 1000);
  CHECK(half.regularizer.c_log == doctest::Approx(162.0));
  CHECK(half.theta == 1.0);

  const auto sh = AlgoConfig::shannon(8, 1000);
  CHECK(sh.regularizer.c_log == doctest::Approx(162.0 * std::log(8.0)));
  CHECK(sh.alpha == 1.0);

  const auto dee = AlgoConfig::decoupled(4, 1000);
  CHECK(dee.mode == ExplorationMode::kDecoupled);
  CHECK(dee.regularizer.c_log == 0.0);
  CHECK(dee.regularizer.beta == doctest::Approx(2.0 / 3.0));
  CHECK(dee.theta == doctest::Approx(std::pow(4.0, 1.0 / 6.0)));
  CHECK(dee.alpha == 0.5);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(AlgoConfig::log_barrier(2), bobw::ConfigError);
  CHECK_THROWS_AS(AlgoConfig::shannon(4, 2), bobw::ConfigError);
  CHECK_NOTHROW(AlgoConfig::tsallis(0.5, 2).validate());
  CHECK_THROWS_AS(AlgoConfig::preset("tsallis:1.5", 4, 100), bobw::ConfigError);
  CHECK_THROWS_AS(AlgoConfig::preset("tsallis:abc", 4, 100), bobw::ConfigError);
  CHECK_THROWS_AS(AlgoConfig::preset("exp3", 4, 100), bobw::ConfigError);
  auto bad = AlgoConfig::tsallis(0.5, 100);
  bad.mode = ExplorationMode::kDecoupled;
  CHECK_THROWS_AS(bad.validate(), bobw::ConfigError);
}

TEST_CASE("learning rates start at theta") {
  const bobw::LearningRateState state(3);
  CHECK((bobw::learning_rates(state, 0.7).array() == 0.7).all());
}

TEST_CASE("learning rate clipping at 1/T") {
  bobw::LearningRateState state(2);
  state.accumulate(vec({0.05, 0.95}), 0.0, 10);
  state.accumulate(vec({0.5, 0.5}), 0.0, 10);
  // Arm 0 history (0.05, 0.5) clips to (0.1, 0.5).
  CHECK(state.sums()[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(bobw::learning_rates(state, 2.0)[0] == doctest::Approx(2.0 * std::sqrt(1.6)).epsilon(1e-15));
}

TEST_CASE("alpha one half gives theta sqrt(t)") {
  bobw::LearningRateState state(3);
  for (int t = 1; t <= 50; ++t) {
    CHECK((bobw::learning_rates(state, 1.0).array() == std::sqrt(static_cast<double>(t))).all());
    state.accumulate(vec({0.01, 0.2, 0.79}), 0.5, 100);
  }
}

TEST_CASE("first round is uniform") {
  for (const std::string name : {"log-barrier", "tsallis:0.3", "shannon", "dee"}) {
    bobw::FtrlPolicy policy(AlgoConfig::preset(name, 5, 100), 5, bobw::CounterRng(9));
    const auto a = policy.next_distribution();
    CHECK((a.distribution.probs().array() - 0.2).abs().maxCoeff() <= 1e-12);
    CHECK((a.exploration.probs().array() - 0.2).abs().maxCoeff() <= 1e-12);
    CHECK(a.round == 1);
  }
}

TEST_CASE("decoupled exploration distribution") {
  const Vector g = bobw::exploration_distribution(vec({0.8, 0.2}));
  const double a = std::pow(0.8, 2.0 / 3.0), b = std::pow(0.2, 2.0 / 3.0);
  CHECK(g[0] == doctest::Approx(a / (a + b)).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(b / (a + b)).epsilon(1e-14));
  CHECK(std::abs(g[0] - 0.71598) <= 1e-4);
  CHECK(std::abs(g[1] - 0.28414) <= 1e-4);
  CHECK((bobw::exploration_distribution(Vector::Constant(4, 0.25)).array() - 0.25).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("observe adds the importance-weighted estimate") {
  bobw::FtrlPolicy policy(AlgoConfig::tsallis(0.5, 10), 2, bobw::CounterRng(1));
  const auto a = policy.next_distribution();
  auto fixed = fixed_action(vec({0.5, 0.5}), vec({0.5, 0.5}), 0, 0);
  fixed.round = a.round;
  policy.observe(fixed, 1.0);
  CHECK(policy.cumulative().totals()[0] == 2.0);
  CHECK(policy.cumulative().totals()[1] == 0.0);
  CHECK(policy.round() == 2);
  CHECK((policy.learning_rate_state().sums().array() == 1.0).all());
  CHECK_THROWS_AS(policy.observe(fixed, 1.0), bobw::DomainError);
}

TEST_CASE("decoupled estimate uses the exploration probability") {
  const auto a = fixed_action(vec({0.5, 0.5}), vec({0.25, 0.75}), 0, 1);
  const auto e = bobw::estimate_loss(a, ExplorationMode::kDecoupled, 0.6);
  CHECK(e.arm == 1);
  CHECK(e.value == doctest::Approx(0.8));
}

TEST_CASE("estimator is unbiased") {
  const Vector p = vec({0.3, 0.7});
  const Vector losses = vec({0.4, 0.9});
  const bobw::CounterRng rng(2024);
  for (const auto mode : {ExplorationMode::kCoupled, ExplorationMode::kDecoupled}) {
    const bobw::ArmDistribution dist(p);
    const bobw::ArmDistribution explore(mode == ExplorationMode::kCoupled
                                            ? p
                                            : bobw::exploration_distribution(p));
    Vector mean = Vector::Zero(2);
    constexpr int kDraws = 200000;
    for (int n = 0; n < kDraws; ++n) {
      bobw::RoundAction a = fixed_action(p, explore.probs(), 0, 0);
      a.exploit_arm = dist.sample(rng.uniform(n, bobw::DrawPurpose::kExploit));
      a.explore_arm = mode == ExplorationMode::kCoupled
                          ? a.exploit_arm
                          : explore.sample(rng.uniform(n, bobw::DrawPurpose::kExplore));
      const std::size_t seen = mode == ExplorationMode::kCoupled ? a.exploit_arm : a.explore_arm;
      const auto e = bobw::estimate_loss(a, mode, losses[static_cast<Eigen::Index>(seen)]);
      mean[static_cast<Eigen::Index>(e.arm)] += e.value;
    }
    mean /= kDraws;
    CHECK((mean - losses).cwiseAbs().maxCoeff() <= 0.01);
  }
}

TEST_CASE("horizon is enforced") {
  bobw::FtrlPolicy policy(AlgoConfig::tsallis(0.5, 3), 2, bobw::CounterRng(5));
  for (int t = 0; t < 3; ++t) policy.observe(policy.next_distribution(), 0.5);
  CHECK_THROWS_AS(policy.next_distribution(), bobw::HorizonExceeded);
}

TEST_CASE("same key gives the same trajectory") {
  auto trajectory = [](std::uint64_t key) {
    bobw::FtrlPolicy policy(AlgoConfig::tsallis(0.5, 200), 3, bobw::CounterRng(key));
    std::vector<std::size_t> arms;
    for (int t = 0; t < 200; ++t) {
      const auto a = policy.next_distribution();
      arms.push_back(a.exploit_arm);
      policy.observe(a, a.exploit_arm == 0 ? 0.1 : 0.9);
    }
    return arms;
  };
  CHECK(trajectory(3) == trajectory(3));
  CHECK(trajectory(3) != trajectory(4));
}

TEST_CASE("learning-rate invariants and preset stability") {
  for (const auto& check : {bobw::verify::learning_rate_properties(1500),
                            bobw::verify::preset_stability(1500, 1)}) {
    INFO(check.name << ": " << check.detail);
    CHECK(check.passed);
  }
}
