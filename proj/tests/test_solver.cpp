#include <doctest.h>

#include <cmath>
#include <limits>

#include "bobw/solver.hpp"
#include "primal_oracle.hpp"
#include "verify/suites.hpp"

using bobw::RegularizerSpec;
using bobw::Vector;

TEST_CASE("zero losses give the uniform distribution") {
  for (const auto& spec : {RegularizerSpec::log_barrier(162.0), RegularizerSpec::tsallis(0.3, 5.0),
                           RegularizerSpec::tsallis(0.7), RegularizerSpec::shannon(),
                           RegularizerSpec::shannon(336.8)}) {
    for (int k : {2, 3, 8}) {
      const auto r = bobw::ftrl_argmin<double>(spec, Vector::Constant(k, 3.0), Vector::Zero(k));
      CHECK((r.probs.array() - 1.0 / k).abs().maxCoeff() <= 1e-12);
      CHECK(r.kkt_residual <= 1e-9);
    }
  }
}

TEST_CASE("two-arm log-barrier against the grid oracle") {
  const auto spec = RegularizerSpec::log_barrier();
  const Vector gamma = Vector::Ones(2);
  Vector losses(2);
  losses << 0.0, 1.0;
  const double grid = bobw::oracle::grid_argmin_two_arms(spec, gamma, losses, 1e-7);
  const auto r = bobw::ftrl_argmin<double>(spec, gamma, losses);
  CHECK(std::abs(r.probs[0] - grid) <= 1e-6);
  // Stationarity reduces to p^2 + p - 1 = 0.
  CHECK(r.probs[0] == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  CHECK(std::abs(r.probs.sum() - 1.0) <= 1e-10);
}

TEST_CASE("three-arm half-Tsallis against the primal oracle") {
  const auto spec = RegularizerSpec::tsallis(0.5);
  const Vector gamma = Vector::Constant(3, 2.0);  // sqrt(t) at t = 4
  Vector losses(3);
  losses << 0.0, 0.5, 2.0;
  const auto reference = bobw::oracle::projected_newton_argmin(spec, gamma, losses);
  const auto r = bobw::ftrl_argmin<double>(spec, gamma, losses);
  CHECK((r.probs - reference.probs).lpNorm<Eigen::Infinity>() <= 1e-6);
  // Closed form for c_log = 0: p_i = (gamma / (L_i - nu))^2.
  for (int i = 0; i < 3; ++i) {
    CHECK(r.probs[i] == doctest::Approx(std::pow(2.0 / (losses[i] - r.multiplier), 2)).epsilon(1e-10));
  }
  CHECK(r.probs[0] > r.probs[1]);
  CHECK(r.probs[1] > r.probs[2]);
}

TEST_CASE("KKT residual certificate") {
  const auto spec = RegularizerSpec::log_barrier();
  const Vector gamma = Vector::Ones(2);
  Vector losses(2);
  losses << 0.0, 1.0;
  const auto r = bobw::ftrl_argmin<double>(spec, gamma, losses);
  CHECK(bobw::kkt_residual<double>(spec, gamma, losses, r.probs) <= 1e-9);

  const Vector uniform = Vector::Constant(2, 0.5);
  CHECK(bobw::kkt_residual<double>(spec, gamma, losses, uniform) == doctest::Approx(0.5).epsilon(1e-14));

  Vector perturbed = r.probs;
  perturbed[0] += 1e-4;
  perturbed /= perturbed.sum();
  CHECK(bobw::kkt_residual<double>(spec, gamma, losses, perturbed) > 1e-6);

  Vector boundary(2);
  boundary << 1.0, 0.0;
  CHECK_THROWS_AS(bobw::kkt_residual<double>(spec, gamma, losses, boundary), bobw::DomainError);
}

TEST_CASE("per-coordinate stationarity holds against the multiplier") {
  const auto spec = RegularizerSpec::shannon(20.0);
  Vector gamma(4), losses(4);
  gamma << 1.0, 2.0, 3.0, 4.0;
  losses << 10.0, 0.0, 30.0, 5.0;
  const auto r = bobw::ftrl_argmin<double>(spec, gamma, losses);
  for (int i = 0; i < 4; ++i) {
    const double s = losses[i] + bobw::coord_derivatives(spec, gamma[i], r.probs[i]).grad;
    CHECK(std::abs(s - r.multiplier) <= 1e-9 * std::max(1.0, std::abs(r.multiplier)));
  }
}

TEST_CASE("huge importance-weighted losses do not overflow") {
  for (const auto& spec : {RegularizerSpec::tsallis(0.5, 162.0), RegularizerSpec::shannon(336.8),
                           RegularizerSpec::log_barrier(162.0), RegularizerSpec::tsallis(0.7)}) {
    Vector losses(4);
    losses << 1e12, 3.0, 5e11, 1e12 + 7.0;
    const Vector gamma = Vector::Constant(4, 300.0);
    const auto r = bobw::ftrl_argmin<double>(spec, gamma, losses);
    CHECK(std::abs(r.probs.sum() - 1.0) <= 1e-10);
    CHECK((r.probs.array() > 0.0).all());
    CHECK(r.probs[1] > 0.99);
    // Stationarity terms cancel at the scale of the shifted losses.
    const double scale = (losses.array() - losses.minCoeff()).maxCoeff();
    CHECK(r.kkt_residual <= 16.0 * std::numeric_limits<double>::epsilon() * scale);
  }
}

TEST_CASE("rejects non-finite and mismatched input") {
  const auto spec = RegularizerSpec::tsallis(0.5);
  Vector losses(2);
  losses << 0.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bobw::ftrl_argmin<double>(spec, Vector::Ones(2), losses), bobw::DomainError);
  CHECK_THROWS_AS(bobw::ftrl_argmin<double>(spec, Vector::Ones(3), Vector::Zero(2)),
                  bobw::DimensionMismatch);
  CHECK_THROWS_AS(bobw::ftrl_argmin<double>(spec, Vector::Zero(2), Vector::Zero(2)),
                  bobw::DomainError);
}

TEST_CASE("solver properties") {
  for (const auto& check : {bobw::verify::solver_oracle_equivalence(50, 1),
                            bobw::verify::solver_shift_invariance(200, 2),
                            bobw::verify::solver_monotone_response(200, 3),
                            bobw::verify::solver_warm_start(200, 4)}) {
    INFO(check.name << ": " << check.detail);
    CHECK(check.passed);
  }
}
