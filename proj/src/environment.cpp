#include "bobw/environment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bobw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unit_interval(const Vector& v, const char* what) {
  if (v.size() < 2) throw ConfigError(std::string(what) + ": need at least two arms");
  if (!v.allFinite() || (v.array() < 0.0).any() || (v.array() > 1.0).any()) {
    throw ConfigError(std::string(what) + ": entries must lie in [0, 1]");
  }
}

bool same_gaps(const GapProfile& a, const GapProfile& b) {
  return a.size() == b.size() && ((a.gaps - b.gaps).array().abs() <= kGapTieTolerance).all();
}

}  // namespace

void EnvironmentSpec::validate() const {
  if (horizon < 1) throw ConfigError("environment horizon must be positive");
  std::visit(overloaded{
                 [](const StochasticBernoulli& e) { require_unit_interval(e.means, "means"); },
                 [this](const CorruptedStochastic& e) {
                   require_unit_interval(e.means, "means");
                   if (!(e.budget >= 0.0) || e.budget > static_cast<double>(horizon)) {
                     throw ConfigError("corruption budget must lie in [0, T]");
                   }
                 },
                 [this](const AdversarialMatrix& e) {
                   if (e.losses.cols() < 2) throw ConfigError("loss matrix needs two columns");
                   if (static_cast<std::size_t>(e.losses.rows()) < horizon) {
                     throw ConfigError("loss matrix has fewer rows than the horizon");
                   }
                   if (!e.losses.allFinite() || (e.losses.array() < 0.0).any() ||
                       (e.losses.array() > 1.0).any()) {
                     throw ConfigError("loss matrix entries must lie in [0, 1]");
                   }
                 },
                 [](const SwitchingAdversary& e) {
                   if (e.period < 1) throw ConfigError("switching period must be positive");
                   require_unit_interval(e.first, "profile");
                   require_unit_interval(e.second, "profile");
                   if (e.first.size() != e.second.size()) {
                     throw ConfigError("switching profiles differ in size");
                   }
                 },
             },
             kind);
}

std::size_t EnvironmentSpec::num_arms() const {
  return std::visit(overloaded{
                        [](const StochasticBernoulli& e) { return e.means.size(); },
                        [](const CorruptedStochastic& e) { return e.means.size(); },
                        [](const AdversarialMatrix& e) { return e.losses.cols(); },
                        [](const SwitchingAdversary& e) { return e.first.size(); },
                    },
                    kind);
}

std::string EnvironmentSpec::name() const {
  return std::visit(overloaded{
                        [](const StochasticBernoulli&) { return std::string("stochastic_bernoulli"); },
                        [](const CorruptedStochastic&) { return std::string("corrupted_stochastic"); },
                        [](const AdversarialMatrix&) { return std::string("adversarial_matrix"); },
                        [](const SwitchingAdversary&) { return std::string("switching_adversary"); },
                    },
                    kind);
}

std::optional<GapProfile> EnvironmentSpec::gap_profile() const {
  return std::visit(overloaded{
                        [](const StochasticBernoulli& e) -> std::optional<GapProfile> {
                          return bobw::gap_profile(e.means);
                        },
                        [](const CorruptedStochastic& e) -> std::optional<GapProfile> {
                          return bobw::gap_profile(e.means);
                        },
                        [](const AdversarialMatrix&) -> std::optional<GapProfile> {
                          return std::nullopt;
                        },
                        [](const SwitchingAdversary& e) -> std::optional<GapProfile> {
                          auto a = bobw::gap_profile(e.first);
                          if (same_gaps(a, bobw::gap_profile(e.second))) return a;
                          return std::nullopt;
                        },
                    },
                    kind);
}

std::optional<double> EnvironmentSpec::corruption_budget() const {
  if (const auto* c = std::get_if<CorruptedStochastic>(&kind)) return c->budget;
  if (std::holds_alternative<StochasticBernoulli>(kind)) return 0.0;
  if (std::holds_alternative<SwitchingAdversary>(kind) && gap_profile()) return 0.0;
  return std::nullopt;
}

Environment::Environment(EnvironmentSpec spec, CounterRng rng)
    : spec_(std::move(spec)), rng_(rng) {
  spec_.validate();
  num_arms_ = spec_.num_arms();
  if (const auto* c = std::get_if<CorruptedStochastic>(&spec_.kind)) {
    base_profile_ = gap_profile(c->means);
  }
}

Vector Environment::bernoulli(const Vector& means, std::size_t round) const {
  Vector out(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    const double u = rng_.uniform(round, DrawPurpose::kLoss, static_cast<std::uint64_t>(i));
    out[i] = u < means[i] ? 1.0 : 0.0;
  }
  return out;
}

RoundLoss Environment::emit_loss(HistoryView history) {
  const std::size_t t = history.next_round();
  if (t > spec_.horizon) throw HorizonExceeded("environment: horizon exceeded");

  return std::visit(
      overloaded{
          [&](const StochasticBernoulli& e) {
            return RoundLoss{LossVector(bernoulli(e.means, t)), e.means};
          },
          [&](const CorruptedStochastic& e) {
            Vector realized = bernoulli(e.means, t);
            Vector expected = e.means;
            if (static_cast<double>(t) <= std::floor(e.budget)) {
              for (auto i : base_profile_->optimal_set) {
                const auto idx = static_cast<Eigen::Index>(i);
                realized[idx] = expected[idx] = 1.0;
              }
              for (auto i : base_profile_->suboptimal_set) {
                const auto idx = static_cast<Eigen::Index>(i);
                realized[idx] = expected[idx] = 0.0;
              }
              corruption_spent_ += (expected - e.means).lpNorm<Eigen::Infinity>();
            }
            return RoundLoss{LossVector(std::move(realized)), std::move(expected)};
          },
          [&](const AdversarialMatrix& e) {
            return RoundLoss{
                LossVector(e.losses.row(static_cast<Eigen::Index>(t - 1)).transpose()),
                std::nullopt};
          },
          [&](const SwitchingAdversary& e) {
            const bool second_phase = ((t - 1) / e.period) % 2 == 1;
            const Vector& means = second_phase ? e.second : e.first;
            return RoundLoss{LossVector(bernoulli(means, t)), means};
          },
      },
      spec_.kind);
}

Eigen::MatrixXd load_loss_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open loss matrix: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
      if (used == 0 || used != field.size()) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": loss outside [0, 1]");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty loss matrix: " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

double pseudo_regret(const GapProfile& profile, std::span<const std::size_t> pull_counts) {
  if (pull_counts.size() != profile.size()) throw DimensionMismatch("pull counts size");
  double total = 0.0;
  for (std::size_t i = 0; i < pull_counts.size(); ++i) {
    total += static_cast<double>(pull_counts[i]) * profile.gaps[static_cast<Eigen::Index>(i)];
  }
  return total;
}

double pseudo_regret(const std::optional<GapProfile>& profile,
                     std::span<const std::size_t> pull_counts) {
  if (!profile) throw ProfileAbsent("pseudo-regret needs a gap profile; use realized_regret");
  return pseudo_regret(*profile, pull_counts);
}

double realized_regret(const Eigen::Ref<const Eigen::MatrixXd>& loss_matrix,
                       std::span<const std::size_t> choices) {
  if (static_cast<Eigen::Index>(choices.size()) > loss_matrix.rows()) {
    throw DimensionMismatch("more choices than loss rows");
  }
  const auto n = static_cast<Eigen::Index>(choices.size());
  double learner = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto arm = static_cast<Eigen::Index>(choices[static_cast<std::size_t>(t)]);
    if (arm >= loss_matrix.cols()) throw DimensionMismatch("choice out of range");
    learner += loss_matrix(t, arm);
  }
  if (n == 0) return 0.0;
  return learner - loss_matrix.topRows(n).colwise().sum().minCoeff();
}

void RealizedRegretTracker::add(const LossVector& losses, std::size_t choice) {
  if (losses.size() != static_cast<std::size_t>(arm_totals_.size()) || choice >= losses.size()) {
    throw DimensionMismatch("regret tracker: bad round");
  }
  arm_totals_ += losses.values();
  learner_total_ += losses[choice];
}

}  // namespace bobw
