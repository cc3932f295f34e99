#pragma once

// Property suites run by `bobw verify` and by the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

namespace bobw::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random FTRL instances against the primal oracle: L-inf distance and the
// certified KKT residual.
CheckResult solver_oracle_equivalence(int instances_per_kind, std::uint64_t seed);
CheckResult solver_shift_invariance(int instances, std::uint64_t seed);
CheckResult solver_monotone_response(int instances, std::uint64_t seed);
CheckResult solver_warm_start(int instances, std::uint64_t seed);

CheckResult regularizer_round_trip(int draws_per_family, std::uint64_t seed);
CheckResult regularizer_monotone_gradient();
CheckResult regularizer_finite_differences(int draws_per_family, std::uint64_t seed);
CheckResult gap_profile_properties(int draws, std::uint64_t seed);
CheckResult learning_rate_properties(std::size_t horizon);
CheckResult preset_stability(std::size_t horizon, int seeds);

CheckResult monotonicity_property(int draws_per_family, std::uint64_t seed);
CheckResult lemma2_property(int sequences_per_alpha, std::uint64_t seed);
CheckResult bregman_nonnegativity();

std::vector<CheckResult> solver_suite();
std::vector<CheckResult> invariants_suite();
std::vector<CheckResult> lemmas_suite();
// "solver", "invariants" or "lemmas"; throws ConfigError otherwise.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace bobw::verify
