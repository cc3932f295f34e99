#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bobw/environment.hpp"

using bobw::Vector;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<bobw::RoundLoss> play(bobw::Environment& env, std::size_t rounds) {
  std::vector<std::size_t> arms;
  std::vector<bobw::RoundLoss> out;
  for (std::size_t t = 0; t < rounds; ++t) {
    out.push_back(env.emit_loss({arms}));
    arms.push_back(t % env.num_arms());
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}
}  // namespace

TEST_CASE("stochastic regime reports expected means") {
  bobw::Environment env({bobw::StochasticBernoulli{vec({0.2, 0.7})}, 10}, bobw::CounterRng(1));
  for (const auto& r : play(env, 10)) {
    REQUIRE(r.expected);
    CHECK(*r.expected == vec({0.2, 0.7}));
    CHECK(((r.realized.values().array() == 0.0) || (r.realized.values().array() == 1.0)).all());
  }
  CHECK_THROWS_AS(env.emit_loss({std::vector<std::size_t>(10)}), bobw::HorizonExceeded);
}

TEST_CASE("empirical mean of Bernoulli losses") {
  constexpr std::size_t kT = 100000;
  bobw::Environment env({bobw::StochasticBernoulli{vec({0.5, 0.25})}, kT}, bobw::CounterRng(77));
  std::vector<std::size_t> arms;
  arms.reserve(kT);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t t = 0; t < kT; ++t) {
    const auto r = env.emit_loss({arms});
    s0 += r.realized[0];
    s1 += r.realized[1];
    arms.push_back(0);
  }
  CHECK(std::abs(s0 / kT - 0.5) <= 3.0 * std::sqrt(0.25 / kT));
  CHECK(std::abs(s1 / kT - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / kT));
}

TEST_CASE("zero corruption budget reproduces the i.i.d. stream") {
  const Vector means = vec({0.5, 0.55, 0.6});
  bobw::Environment iid({bobw::StochasticBernoulli{means}, 300}, bobw::CounterRng(5));
  bobw::Environment corrupt({bobw::CorruptedStochastic{means, 0.0}, 300}, bobw::CounterRng(5));
  const auto a = play(iid, 300);
  const auto b = play(corrupt, 300);
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t].realized.values() == b[t].realized.values());
  CHECK(corrupt.corruption_spent() == 0.0);
}

TEST_CASE("corruption flips the first floor(C) rounds and stays within budget") {
  const Vector means = vec({0.5, 0.75, 0.75});
  bobw::Environment env({bobw::CorruptedStochastic{means, 10.5}, 100}, bobw::CounterRng(8));
  const auto rounds = play(env, 100);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(rounds[t].realized.values() == vec({1.0, 0.0, 0.0}));
    CHECK(*rounds[t].expected == vec({1.0, 0.0, 0.0}));
  }
  CHECK(*rounds[10].expected == means);
  CHECK(env.corruption_spent() == doctest::Approx(7.5));
  CHECK(env.corruption_spent() <= 10.5);
  CHECK(*env.spec().corruption_budget() == 10.5);
}

TEST_CASE("switching adversary alternates profiles") {
  const bobw::EnvironmentSpec spec{bobw::SwitchingAdversary{3, vec({0, 1}), vec({1, 0})}, 12};
  bobw::Environment env(spec, bobw::CounterRng(2));
  const auto rounds = play(env, 12);
  for (std::size_t t = 0; t < 12; ++t) {
    const bool second = (t / 3) % 2 == 1;
    CHECK(rounds[t].realized.values() == (second ? vec({1, 0}) : vec({0, 1})));
  }
  CHECK_FALSE(spec.gap_profile());
  CHECK_FALSE(spec.corruption_budget());
}

TEST_CASE("switching adversary with a shared gap profile") {
  const bobw::EnvironmentSpec spec{
      bobw::SwitchingAdversary{5, vec({0.2, 0.4}), vec({0.5, 0.7})}, 20};
  REQUIRE(spec.gap_profile());
  CHECK(spec.gap_profile()->gaps[1] == doctest::Approx(0.2));
}

TEST_CASE("environment score is independent of the learner's arms") {
  bobw::Environment a({bobw::StochasticBernoulli{vec({0.3, 0.6})}, 50}, bobw::CounterRng(3));
  bobw::Environment b({bobw::StochasticBernoulli{vec({0.3, 0.6})}, 50}, bobw::CounterRng(3));
  std::vector<std::size_t> arms_a, arms_b;
  for (int t = 0; t < 50; ++t) {
    CHECK(a.emit_loss({arms_a}).realized.values() == b.emit_loss({arms_b}).realized.values());
    arms_a.push_back(0);
    arms_b.push_back(1);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(bobw::EnvironmentSpec({bobw::StochasticBernoulli{vec({0.3})}, 5}).validate(),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::EnvironmentSpec({bobw::StochasticBernoulli{vec({0.3, 1.2})}, 5}).validate(),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::EnvironmentSpec({bobw::CorruptedStochastic{vec({0.3, 0.5}), 6.0}, 5}).validate(),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::EnvironmentSpec({bobw::AdversarialMatrix{Eigen::MatrixXd::Zero(3, 2)}, 5}).validate(),
                  bobw::ConfigError);
  CHECK_THROWS_AS(
      bobw::EnvironmentSpec({bobw::SwitchingAdversary{0, vec({0, 1}), vec({1, 0})}, 5}).validate(),
      bobw::ConfigError);
}

TEST_CASE("pseudo-regret") {
  const auto zero = bobw::gap_profile(vec({0.5, 0.5}));
  const std::vector<std::size_t> counts{60, 40};
  CHECK(bobw::pseudo_regret(zero, counts) == 0.0);

  const auto gapped = bobw::gap_profile(vec({0.5, 0.75, 0.75}));
  const std::vector<std::size_t> counts3{600, 200, 200};
  CHECK(bobw::pseudo_regret(gapped, counts3) == doctest::Approx(100.0));

  CHECK_THROWS_AS(bobw::pseudo_regret(std::optional<bobw::GapProfile>{}, counts), bobw::ProfileAbsent);
  CHECK_THROWS_AS(bobw::pseudo_regret(gapped, counts), bobw::DimensionMismatch);
}

TEST_CASE("realized regret") {
  Eigen::MatrixXd m(4, 2);
  m << 0, 1, 0, 1, 1, 0, 0, 1;
  const std::vector<std::size_t> choices{1, 1, 0, 0};
  // learner 1+1+1+0 = 3, best arm 0 totals 1
  CHECK(bobw::realized_regret(m, choices) == 2.0);

  bobw::RealizedRegretTracker tracker(2);
  for (Eigen::Index t = 0; t < 4; ++t) {
    tracker.add(bobw::LossVector(m.row(t).transpose()), choices[static_cast<std::size_t>(t)]);
  }
  CHECK(tracker.regret() == 2.0);
}

TEST_CASE("loss matrix CSV") {
  const auto good = temp_file("bobw_matrix_good.csv", "0,1\n0.25, 0.5\r\n\n1,0\n");
  const auto m = bobw::load_loss_matrix_csv(good.string());
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 2);
  CHECK(m(1, 0) == 0.25);
  CHECK(m(1, 1) == 0.5);

  bobw::Environment env({bobw::AdversarialMatrix{m}, 3}, bobw::CounterRng(0));
  const auto rounds = play(env, 3);
  CHECK(rounds[2].realized.values() == vec({1, 0}));
  CHECK_FALSE(rounds[0].expected);

  CHECK_THROWS_AS(bobw::load_loss_matrix_csv(temp_file("bobw_m1.csv", "0,1\n0.5\n").string()),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::load_loss_matrix_csv(temp_file("bobw_m2.csv", "0,x\n").string()),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::load_loss_matrix_csv(temp_file("bobw_m3.csv", "0,1.5\n").string()),
                  bobw::ConfigError);
  CHECK_THROWS_AS(bobw::load_loss_matrix_csv("/nonexistent/bobw.csv"), bobw::ConfigError);
  for (const char* f : {"bobw_matrix_good.csv", "bobw_m1.csv", "bobw_m2.csv", "bobw_m3.csv"}) {
    std::filesystem::remove(std::filesystem::temp_directory_path() / f);
  }
}
