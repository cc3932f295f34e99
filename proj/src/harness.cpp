#include "bobw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "bobw/solver.hpp"

namespace bobw {

using nlohmann::json;

RunRecord run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  const std::size_t k = config.environment.num_arms();
  FtrlPolicy policy(config.algorithm, k, CounterRng::derive(config.experiment_id, seed, "policy"));
  Environment env(config.environment,
                  CounterRng::derive(config.experiment_id, seed, "environment"));

  const auto profile = config.environment.gap_profile();
  SelfBoundingTrace trace(profile ? profile->suboptimal_set : std::vector<std::size_t>{});
  RealizedRegretTracker realized(k);
  std::optional<ConjectureAccumulator> conjecture;
  if (config.checks.conjecture) {
    conjecture.emplace(k, config.algorithm.regularizer.beta, config.horizon);
  }

  const auto checkpoints = config.checkpoints();
  auto next_checkpoint = checkpoints.begin();

  RunRecord record;
  record.seed = seed;
  std::vector<std::size_t> arms;
  arms.reserve(config.horizon);
  std::vector<std::size_t> counts(k, 0);
  std::optional<ArmDistribution> previous;
  std::size_t violations = 0;
  double max_kkt = 0.0;
  std::size_t solver_iterations = 0;

  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const RoundAction action = policy.next_distribution();
    if (config.checks.kkt) {
      const Vector gamma = policy.current_rates();
      max_kkt = std::max(max_kkt, kkt_residual<double>(config.algorithm.regularizer, gamma,
                                                       policy.cumulative().totals(),
                                                       action.distribution.probs()));
    }
    if (config.checks.stability && previous) {
      if (check_stability(*previous, action.distribution, t).violated) ++violations;
    }
    trace.add(action.distribution.probs());
    if (conjecture) conjecture->add(action.distribution.probs());
    solver_iterations += static_cast<std::size_t>(action.solver_iterations);

    const RoundLoss loss = env.emit_loss(HistoryView{arms});
    const std::size_t observed =
        config.algorithm.mode == ExplorationMode::kCoupled ? action.exploit_arm : action.explore_arm;
    policy.observe(action, loss.realized[observed]);

    realized.add(loss.realized, action.exploit_arm);
    arms.push_back(action.exploit_arm);
    ++counts[action.exploit_arm];
    previous = action.distribution;

    if (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      CheckpointRecord cp;
      cp.t = t;
      cp.regret = profile ? pseudo_regret(*profile, counts) : realized.regret();
      cp.cum_v_prob = trace.cum_v_prob();
      cp.pull_counts = counts;
      cp.stability_violations = violations;
      cp.max_kkt_residual = max_kkt;
      cp.mean_solver_iters = static_cast<double>(solver_iterations) / static_cast<double>(t);
      record.checkpoints.push_back(std::move(cp));
      ++next_checkpoint;
    }
  }

  record.corruption_spent = env.corruption_spent();
  if (config.checks.self_bounding) record.self_bounding = self_bounding_values(trace, 1.0);
  if (conjecture) {
    record.conjecture_value = conjecture->value();
    record.conjecture_reference = conjecture->reference();
  }
  return record;
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("BOBW_WORKERS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return 1;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  if (workers == 0) workers = default_worker_count();
  workers = std::min(workers, seeds.size());

  std::vector<RunRecord> runs(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        runs[i] = run_seed(config, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.summary = summarize(config, runs);
  result.runs = std::move(runs);
  return result;
}

std::vector<CheckpointStats> checkpoint_stats(std::span<const std::size_t> ts,
                                              std::span<const std::vector<double>> values) {
  std::vector<CheckpointStats> stats;
  for (std::size_t c = 0; c < ts.size(); ++c) {
    const auto& xs = values[c];
    CheckpointStats s;
    s.t = ts[c];
    s.n = xs.size();
    if (!xs.empty()) {
      double sum = 0.0;
      for (const double x : xs) sum += x;
      s.mean = sum / static_cast<double>(xs.size());
    }
    if (xs.size() >= 2) {
      double ss = 0.0;
      for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
      const double n = static_cast<double>(xs.size());
      s.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    stats.push_back(s);
  }
  return stats;
}

ExperimentSummary summarize(const ExperimentConfig& config, std::span<const RunRecord> runs) {
  ExperimentSummary summary;
  const auto profile = config.environment.gap_profile();
  summary.regret_kind = profile ? "pseudo" : "realized";
  summary.num_seeds = runs.size();
  if (profile) summary.complexity = profile->complexity;
  summary.d_proxy = config.environment.corruption_budget();

  const auto ts = config.checkpoints();
  std::vector<std::vector<double>> values(ts.size());
  double conjecture_total = 0.0;
  for (const auto& run : runs) {
    for (std::size_t c = 0; c < run.checkpoints.size() && c < ts.size(); ++c) {
      values[c].push_back(run.checkpoints[c].regret);
    }
    if (!run.checkpoints.empty()) {
      summary.total_stability_violations += run.checkpoints.back().stability_violations;
      summary.max_kkt_residual = std::max(summary.max_kkt_residual, run.checkpoints.back().max_kkt_residual);
    }
    summary.mean_s1 += run.self_bounding.s1;
    summary.mean_s2 += run.self_bounding.s2;
    if (run.conjecture_value) conjecture_total += *run.conjecture_value;
  }
  if (!runs.empty()) {
    const double n = static_cast<double>(runs.size());
    summary.mean_s1 /= n;
    summary.mean_s2 /= n;
    if (config.checks.conjecture) summary.mean_conjecture_value = conjecture_total / n;
  }
  summary.regret = checkpoint_stats(ts, values);
  return summary;
}

double ExperimentSummary::mean_regret_at(std::size_t t) const {
  for (const auto& s : regret) {
    if (s.t == t) return s.mean;
  }
  throw ConfigError("checkpoint not logged: " + std::to_string(t));
}

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

CsvRow to_csv_row(std::uint64_t seed, const CheckpointRecord& r) {
  const auto round12 = [](double v) { return std::strtod(format_real(v).c_str(), nullptr); };
  return {seed,
          r.t,
          round12(r.regret),
          round12(r.cum_v_prob),
          r.stability_violations,
          round12(r.max_kkt_residual),
          round12(r.mean_solver_iters)};
}

void emit_csv(std::span<const RunRecord> runs, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& r : run.checkpoints) {
      out << run.seed << ',' << r.t << ',' << format_real(r.regret) << ','
          << format_real(r.cum_v_prob) << ',' << r.stability_violations << ','
          << format_real(r.max_kkt_residual) << ',' << format_real(r.mean_solver_iters) << '\n';
    }
  }
}

void emit_csv(std::span<const RunRecord> runs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  emit_csv(runs, out);
  if (!out) throw Error("write failed: " + path);
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error("unexpected CSV header: " + line);

  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw Error("CSV line " + std::to_string(line_no) + ": expected 7 fields");
    try {
      CsvRow row;
      row.seed = std::stoull(fields[0]);
      row.t = std::stoull(fields[1]);
      row.regret = std::strtod(fields[2].c_str(), nullptr);
      row.cum_v_prob = std::strtod(fields[3].c_str(), nullptr);
      row.stability_violations = std::stoull(fields[4]);
      row.max_kkt_residual = std::strtod(fields[5].c_str(), nullptr);
      row.mean_solver_iters = std::strtod(fields[6].c_str(), nullptr);
      rows.push_back(row);
    } catch (const std::exception&) {
      throw Error("CSV line " + std::to_string(line_no) + ": bad field");
    }
  }
  return rows;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json summary_document(const ExperimentConfig& config, const ExperimentSummary& summary) {
  json checkpoints = json::array();
  for (const auto& s : summary.regret) {
    checkpoints.push_back({{"t", s.t},
                           {"mean_regret", s.mean},
                           {"stderr_regret", optional_json(s.standard_error)},
                           {"n_seeds", s.n}});
  }
  return {
      {"config", describe(config)},
      {"regret_kind", summary.regret_kind},
      {"num_seeds", summary.num_seeds},
      {"complexity", optional_json(summary.complexity)},
      {"d_proxy", optional_json(summary.d_proxy)},
      {"total_stability_violations", summary.total_stability_violations},
      {"max_kkt_residual", summary.max_kkt_residual},
      {"mean_s1_raw", summary.mean_s1},
      {"mean_s2_raw", summary.mean_s2},
      {"mean_conjecture_value", optional_json(summary.mean_conjecture_value)},
      {"checkpoints", checkpoints},
  };
}

void emit_summary(const ExperimentConfig& config, const ExperimentSummary& summary,
                  std::ostream& out) {
  out << summary_document(config, summary).dump(2) << '\n';
}

std::vector<CheckpointStats> plot_data(std::span<const CsvRow> rows) {
  std::map<std::size_t, std::vector<double>> by_t;
  for (const auto& r : rows) by_t[r.t].push_back(r.regret);
  std::vector<std::size_t> ts;
  std::vector<std::vector<double>> values;
  for (auto& [t, xs] : by_t) {
    ts.push_back(t);
    values.push_back(std::move(xs));
  }
  return checkpoint_stats(ts, values);
}

void emit_plot_data(std::span<const CheckpointStats> stats, std::ostream& out) {
  out << "t,mean_regret,stderr_regret,n_seeds\n";
  for (const auto& s : stats) {
    out << s.t << ',' << format_real(s.mean) << ','
        << (s.standard_error ? format_real(*s.standard_error) : std::string()) << ',' << s.n
        << '\n';
  }
}

}  // namespace bobw
