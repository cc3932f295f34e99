#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bobw/diagnostics.hpp"
#include "bobw/environment.hpp"
#include "bobw/policy.hpp"

namespace bobw {

struct DiagnosticChecks {
  bool stability = true;
  bool self_bounding = true;
  bool kkt = true;
  bool conjecture = false;  // Tsallis only
};

struct ExperimentConfig {
  std::string experiment_id = "default";
  std::string algorithm_name = "custom";
  AlgoConfig algorithm;
  EnvironmentSpec environment;
  std::size_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::size_t log_every = 0;  // 0: geometric grid {1, 2, 4, ...} plus T
  DiagnosticChecks checks;

  void validate() const;
  std::vector<std::size_t> checkpoints() const;
};

// Parses the JSON document described in docs/config.md. Relative loss-matrix
// paths resolve against base_dir.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::string& base_dir = ".");

// Applies "dotted.key=value" overrides; values parse as JSON, else as strings.
void apply_overrides(nlohmann::json& doc, std::span<const std::string> overrides);

ExperimentConfig load_experiment_config(const std::string& path,
                                        std::span<const std::string> overrides = {},
                                        const std::optional<std::string>& preset = std::nullopt);

nlohmann::json describe(const ExperimentConfig& config);

struct CheckpointRecord {
  std::size_t t = 0;
  double regret = 0.0;  // pseudo-regret when gaps exist, realized otherwise
  double cum_v_prob = 0.0;
  std::vector<std::size_t> pull_counts;
  std::size_t stability_violations = 0;
  double max_kkt_residual = 0.0;
  double mean_solver_iters = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<CheckpointRecord> checkpoints;
  double corruption_spent = 0.0;
  SelfBoundingValues self_bounding;  // at x = 1, end of run
  std::optional<double> conjecture_value;
  std::optional<double> conjecture_reference;
};

struct CheckpointStats {
  std::size_t t = 0;
  double mean = 0.0;
  std::optional<double> standard_error;  // needs at least two seeds
  std::size_t n = 0;
};

struct ExperimentSummary {
  std::string regret_kind;  // "pseudo" or "realized"
  std::vector<CheckpointStats> regret;
  std::size_t total_stability_violations = 0;
  double max_kkt_residual = 0.0;
  std::optional<double> complexity;
  std::optional<double> d_proxy;
  std::optional<double> mean_conjecture_value;
  double mean_s1 = 0.0;
  double mean_s2 = 0.0;
  std::size_t num_seeds = 0;

  // Mean regret at checkpoint t; throws ConfigError if t is not logged.
  double mean_regret_at(std::size_t t) const;
};

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<RunRecord> runs;  // ordered by seed value
};

RunRecord run_seed(const ExperimentConfig& config, std::uint64_t seed);

// Runs every seed on a pool of `workers` threads (0: BOBW_WORKERS or 1).
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers = 0);

ExperimentSummary summarize(const ExperimentConfig& config, std::span<const RunRecord> runs);

std::vector<CheckpointStats> checkpoint_stats(std::span<const std::size_t> ts,
                                              std::span<const std::vector<double>> values);

std::size_t default_worker_count();

// CSV with header seed,t,regret,cum_v_prob,stability_violations,
// max_kkt_residual,mean_solver_iters; reals at 12 significant digits.
inline constexpr const char* kCsvHeader =
    "seed,t,regret,cum_v_prob,stability_violations,max_kkt_residual,mean_solver_iters";

struct CsvRow {
  std::uint64_t seed = 0;
  std::size_t t = 0;
  double regret = 0.0;
  double cum_v_prob = 0.0;
  std::size_t stability_violations = 0;
  double max_kkt_residual = 0.0;
  double mean_solver_iters = 0.0;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

std::string format_real(double value);
CsvRow to_csv_row(std::uint64_t seed, const CheckpointRecord& record);

void emit_csv(std::span<const RunRecord> runs, std::ostream& out);
void emit_csv(std::span<const RunRecord> runs, const std::string& path);
std::vector<CsvRow> parse_csv(std::istream& in);

nlohmann::json summary_document(const ExperimentConfig& config, const ExperimentSummary& summary);
void emit_summary(const ExperimentConfig& config, const ExperimentSummary& summary,
                  std::ostream& out);

// Per-checkpoint mean and standard error over seeds: t,mean_regret,stderr_regret,n_seeds.
std::vector<CheckpointStats> plot_data(std::span<const CsvRow> rows);
void emit_plot_data(std::span<const CheckpointStats> stats, std::ostream& out);

}  // namespace bobw
