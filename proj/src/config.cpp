#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "bobw/harness.hpp"

namespace bobw {

using nlohmann::json;

namespace {

Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json to_json_array(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

RegularizerKind parse_kind(const std::string& name) {
  if (name == "log-barrier" || name == "log_barrier") return RegularizerKind::kLogBarrier;
  if (name == "tsallis") return RegularizerKind::kTsallis;
  if (name == "shannon") return RegularizerKind::kShannon;
  throw ConfigError("unknown regularizer: " + name);
}

std::string kind_name(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::kLogBarrier: return "log-barrier";
    case RegularizerKind::kTsallis: return "tsallis";
    case RegularizerKind::kShannon: return "shannon";
  }
  return "unknown";
}

AlgoConfig parse_algorithm(const json& j, std::size_t num_arms, std::size_t horizon,
                           std::string& name) {
  if (j.is_string()) {
    name = j.get<std::string>();
    return AlgoConfig::preset(name, num_arms, horizon);
  }
  if (!j.is_object()) throw ConfigError("algorithm must be a preset name or an object");
  AlgoConfig algo;
  if (j.contains("preset")) {
    name = required<std::string>(j, "preset");
    algo = AlgoConfig::preset(name, num_arms, horizon);
  } else {
    name = "custom";
    algo.regularizer.kind = parse_kind(required<std::string>(j, "regularizer"));
    algo.alpha = required<double>(j, "alpha");
    algo.theta = required<double>(j, "theta");
  }
  if (j.contains("regularizer")) algo.regularizer.kind = parse_kind(required<std::string>(j, "regularizer"));
  if (j.contains("beta")) algo.regularizer.beta = required<double>(j, "beta");
  if (j.contains("c_log")) algo.regularizer.c_log = required<double>(j, "c_log");
  if (j.contains("alpha")) algo.alpha = required<double>(j, "alpha");
  if (j.contains("theta")) algo.theta = required<double>(j, "theta");
  if (j.contains("mode")) {
    const auto mode = required<std::string>(j, "mode");
    if (mode == "coupled") algo.mode = ExplorationMode::kCoupled;
    else if (mode == "decoupled") algo.mode = ExplorationMode::kDecoupled;
    else throw ConfigError("unknown mode: " + mode);
  }
  if (name != "custom" && j.size() > 1) name += "+custom";
  algo.horizon = horizon;
  return algo;
}

EnvironmentKind parse_environment(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("environment must be an object");
  const auto kind = required<std::string>(j, "kind");
  if (kind == "stochastic_bernoulli") {
    return StochasticBernoulli{to_vector(j.at("means"), "means")};
  }
  if (kind == "corrupted_stochastic") {
    CorruptedStochastic c{to_vector(required<json>(j, "means"), "means"), required<double>(j, "budget")};
    if (j.contains("rule") && required<std::string>(j, "rule") != "front_loaded_flip") {
      throw ConfigError("unknown corruption rule");
    }
    return c;
  }
  if (kind == "adversarial_matrix") {
    std::filesystem::path path = required<std::string>(j, "path");
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    return AdversarialMatrix{load_loss_matrix_csv(path.string())};
  }
  if (kind == "switching_adversary") {
    const auto profiles = required<json>(j, "profiles");
    if (!profiles.is_array() || profiles.size() != 2) {
      throw ConfigError("switching_adversary needs exactly two profiles");
    }
    return SwitchingAdversary{required<std::size_t>(j, "period"),
                              to_vector(profiles[0], "profile"), to_vector(profiles[1], "profile")};
  }
  throw ConfigError("unknown environment kind: " + kind);
}

json describe_environment(const EnvironmentSpec& spec) {
  json out;
  out["kind"] = spec.name();
  if (const auto* e = std::get_if<StochasticBernoulli>(&spec.kind)) {
    out["means"] = to_json_array(e->means);
  } else if (const auto* c = std::get_if<CorruptedStochastic>(&spec.kind)) {
    out["means"] = to_json_array(c->means);
    out["budget"] = c->budget;
    out["rule"] = "front_loaded_flip";
  } else if (const auto* m = std::get_if<AdversarialMatrix>(&spec.kind)) {
    out["rows"] = m->losses.rows();
    out["arms"] = m->losses.cols();
  } else if (const auto* s = std::get_if<SwitchingAdversary>(&spec.kind)) {
    out["period"] = s->period;
    out["profiles"] = json::array({to_json_array(s->first), to_json_array(s->second)});
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (algorithm.horizon != horizon || environment.horizon != horizon) {
    throw ConfigError("algorithm and environment horizons must match the experiment horizon");
  }
  algorithm.validate();
  environment.validate();
  if (checks.conjecture && algorithm.regularizer.kind != RegularizerKind::kTsallis) {
    throw ConfigError("the conjecture probe is defined for Tsallis regularizers only");
  }
}

std::vector<std::size_t> ExperimentConfig::checkpoints() const {
  std::vector<std::size_t> ts;
  if (log_every == 0) {
    for (std::size_t t = 1; t < horizon; t *= 2) ts.push_back(t);
  } else {
    for (std::size_t t = log_every; t < horizon; t += log_every) ts.push_back(t);
  }
  ts.push_back(horizon);
  return ts;
}

void apply_overrides(json& doc, std::span<const std::string> overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + item);
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError("bad override key: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      if (!node->contains(part) || !(*node)[part].is_object()) {
        // A preset string becomes {"preset": ...} so individual fields can be overridden.
        if (node->contains(part) && (*node)[part].is_string()) {
          (*node)[part] = json{{"preset", (*node)[part]}};
        } else {
          (*node)[part] = json::object();
        }
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
}

ExperimentConfig parse_experiment_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  config.horizon = required<std::size_t>(doc, "horizon");
  if (doc.contains("experiment_id")) config.experiment_id = required<std::string>(doc, "experiment_id");

  const json& seeds = required<json>(doc, "seeds");
  if (seeds.is_number_integer()) {
    if (seeds.get<std::int64_t>() < 0) throw ConfigError("seed count must be nonnegative");
    for (std::uint64_t s = 1; s <= seeds.get<std::uint64_t>(); ++s) config.seeds.push_back(s);
  } else if (seeds.is_array()) {
    for (const auto& s : seeds) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ConfigError("seeds must be nonnegative integers");
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    throw ConfigError("seeds must be a list of integers or a count");
  }

  config.environment.kind = parse_environment(required<json>(doc, "environment"), base_dir);
  config.environment.horizon = config.horizon;
  config.algorithm = parse_algorithm(required<json>(doc, "algorithm"),
                                     config.environment.num_arms(), config.horizon,
                                     config.algorithm_name);

  if (doc.contains("log_every")) config.log_every = required<std::size_t>(doc, "log_every");
  if (doc.contains("checks")) {
    const json& c = doc.at("checks");
    if (!c.is_object()) throw ConfigError("checks must be an object");
    config.checks.stability = c.value("stability", config.checks.stability);
    config.checks.self_bounding = c.value("self_bounding", config.checks.self_bounding);
    config.checks.kkt = c.value("kkt", config.checks.kkt);
    config.checks.conjecture = c.value("conjecture", config.checks.conjecture);
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path,
                                        std::span<const std::string> overrides,
                                        const std::optional<std::string>& preset) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
  if (preset) doc["algorithm"] = *preset;
  apply_overrides(doc, overrides);
  const auto base = std::filesystem::path(path).parent_path();
  return parse_experiment_config(doc, base.empty() ? "." : base.string());
}

json describe(const ExperimentConfig& config) {
  const auto& a = config.algorithm;
  json algo = {
      {"name", config.algorithm_name},
      {"regularizer", kind_name(a.regularizer.kind)},
      {"c_log", a.regularizer.c_log},
      {"alpha", a.alpha},
      {"theta", a.theta},
      {"mode", a.mode == ExplorationMode::kCoupled ? "coupled" : "decoupled"},
  };
  if (a.regularizer.kind == RegularizerKind::kTsallis) algo["beta"] = a.regularizer.beta;
  return {
      {"experiment_id", config.experiment_id},
      {"horizon", config.horizon},
      {"seeds", config.seeds},
      {"log_every", config.log_every},
      {"algorithm", algo},
      {"environment", describe_environment(config.environment)},
      {"checks",
       {{"stability", config.checks.stability},
        {"self_bounding", config.checks.self_bounding},
        {"kkt", config.checks.kkt},
        {"conjecture", config.checks.conjecture}}},
  };
}

}  // namespace bobw
