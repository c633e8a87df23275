#include "pafnet/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pafnet/errors.hpp"

namespace pafnet {

using nlohmann::json;

double ScheduleConfig::lr_at(long epoch, long total_epochs) const {
  if (kind == "constant") return lr;
  if (kind == "two_phase") {
    long acc = 0;
    for (const auto& [rate, n] : phases) {
      acc += n;
      if (epoch < acc) return rate;
    }
    return phases.back().first;
  }
  if (kind == "linear") {
    if (total_epochs <= 1) return lr_start;
    const double f = static_cast<double>(epoch) / static_cast<double>(total_epochs - 1);
    return lr_start + (lr_end - lr_start) * f;
  }
  throw ConfigError("unknown schedule kind '" + kind + "'");
}

long ScheduleConfig::total_epochs_or(long fallback) const {
  if (kind == "two_phase") {
    long total = 0;
    for (const auto& [rate, n] : phases) total += n;
    return total;
  }
  return fallback;
}

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
  }
}

std::map<std::string, std::pair<double, double>> parse_ranges(const json& j,
                                                              const std::string& ctx) {
  std::map<std::string, std::pair<double, double>> out;
  if (!j.is_object()) throw ConfigError(ctx + " must map variables to [lo, hi]");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& r = it.value();
    if (!r.is_array() || r.size() != 2)
      throw ConfigError(ctx + "." + it.key() + " must be [lo, hi]");
    out[it.key()] = {r[0].get<double>(), r[1].get<double>()};
  }
  return out;
}

// one layer's activations: "tanh" or ["tanh:4", "cos:2", "exp"]
std::vector<std::string> parse_layer_activations(const json& j, int width,
                                                 const std::string& ctx) {
  std::vector<std::string> out;
  auto push = [&](const std::string& token) {
    std::string name = token;
    int count = 1;
    if (auto colon = token.find(':'); colon != std::string::npos) {
      name = token.substr(0, colon);
      try {
        count = std::stoi(token.substr(colon + 1));
      } catch (...) {
        throw ConfigError(ctx + ": bad neuron count in '" + token + "'");
      }
    }
    if (!is_activation_name(name))
      throw ConfigError(ctx + ": unknown activation '" + name + "'");
    for (int i = 0; i < count; ++i) out.push_back(name);
  };
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (!is_activation_name(name))
      throw ConfigError(ctx + ": unknown activation '" + name + "'");
    out.assign(static_cast<std::size_t>(width), name);
  } else if (j.is_array()) {
    for (const json& e : j) {
      if (!e.is_string()) throw ConfigError(ctx + " entries must be strings");
      push(e.get<std::string>());
    }
  } else {
    throw ConfigError(ctx + " must be a string or an array of strings");
  }
  if (out.size() != static_cast<std::size_t>(width))
    throw ConfigError(ctx + " names " + std::to_string(out.size()) +
                      " neurons but the layer has " + std::to_string(width));
  return out;
}

NetworkSpec parse_network(const json& j) {
  expect_keys(j, {"inputs", "hidden", "activations", "guard_domains"}, "network");
  NetworkSpec spec;
  if (!j.contains("inputs") || !j.contains("hidden") || !j.contains("activations"))
    throw ConfigError("network requires inputs, hidden, activations");
  for (const json& v : j.at("inputs")) spec.input_vars.push_back(v.get<std::string>());
  for (const json& v : j.at("hidden")) spec.hidden_widths.push_back(v.get<int>());
  spec.guard_domains = j.value("guard_domains", true);

  const json& acts = j.at("activations");
  if (acts.is_string()) {
    for (int w : spec.hidden_widths)
      spec.activation_map.push_back(
          parse_layer_activations(acts, w, "network.activations"));
  } else if (acts.is_array()) {
    if (acts.size() != spec.hidden_widths.size())
      throw ConfigError("network.activations must have one entry per hidden layer");
    for (std::size_t k = 0; k < acts.size(); ++k)
      spec.activation_map.push_back(parse_layer_activations(
          acts[k], spec.hidden_widths[k],
          "network.activations[" + std::to_string(k) + "]"));
  } else {
    throw ConfigError("network.activations must be a string or array");
  }
  return spec;
}

OptimizerConfig parse_optimizer(const json& j) {
  expect_keys(j,
              {"kind", "epochs", "polish_epochs", "learning_rate", "schedule",
               "history", "c1", "c2", "max_linesearch", "early_stop_patience"},
              "optimizer");
  OptimizerConfig oc;
  oc.kind = j.value("kind", "adam");
  if (oc.kind != "adam" && oc.kind != "lbfgs" && oc.kind != "adam_lbfgs")
    throw ConfigError("optimizer.kind must be adam, lbfgs or adam_lbfgs");
  oc.polish_epochs = j.value("polish_epochs", 0l);
  if (oc.polish_epochs < 0) throw ConfigError("polish_epochs must be >= 0");
  oc.history = j.value("history", 10);
  oc.c1 = j.value("c1", 1e-4);
  oc.c2 = j.value("c2", 0.9);
  oc.max_linesearch = j.value("max_linesearch", 25);
  oc.early_stop_patience = j.value("early_stop_patience", 200l);

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    expect_keys(s, {"kind", "lr", "phases", "lr_start", "lr_end"},
                "optimizer.schedule");
    oc.schedule.kind = s.value("kind", "constant");
    oc.schedule.lr = s.value("lr", 1e-3);
    oc.schedule.lr_start = s.value("lr_start", 0.0);
    oc.schedule.lr_end = s.value("lr_end", 0.0);
    if (s.contains("phases")) {
      for (const json& p : s.at("phases")) {
        if (!p.is_array() || p.size() != 2)
          throw ConfigError("schedule.phases entries must be [lr, epochs]");
        oc.schedule.phases.emplace_back(p[0].get<double>(), p[1].get<long>());
      }
    }
    if (oc.schedule.kind == "two_phase" && oc.schedule.phases.empty())
      throw ConfigError("two_phase schedule needs phases");
    if (oc.schedule.kind == "linear" &&
        !(s.contains("lr_start") && s.contains("lr_end")))
      throw ConfigError("linear schedule needs lr_start and lr_end");
  }
  if (j.contains("learning_rate")) {
    if (j.contains("schedule"))
      throw ConfigError("give either learning_rate or schedule, not both");
    oc.schedule.kind = "constant";
    oc.schedule.lr = j.at("learning_rate").get<double>();
  }

  const long declared = j.value("epochs", -1l);
  oc.epochs = oc.schedule.total_epochs_or(declared);
  if (oc.schedule.kind == "two_phase" && declared >= 0 && declared != oc.epochs)
    throw ConfigError("optimizer.epochs conflicts with the phase total");
  if (oc.epochs < 0) throw ConfigError("optimizer.epochs is required");
  return oc;
}

DatasetConfig parse_dataset(const json& j) {
  expect_keys(j,
              {"mode", "data_ranges", "physics_ranges", "test_ranges", "n_data",
               "n_physics", "n_test", "n_bc", "n_ic", "n_boundary_data",
               "validation_fraction", "oracle"},
              "dataset");
  DatasetConfig dc;
  const std::string mode = j.value("mode", "random");
  if (mode == "grid")
    dc.mode = SampleMode::Grid;
  else if (mode == "random")
    dc.mode = SampleMode::UniformRandom;
  else
    throw ConfigError("dataset.mode must be grid or random");
  if (!j.contains("data_ranges") || !j.contains("physics_ranges"))
    throw ConfigError("dataset requires data_ranges and physics_ranges");
  dc.data_ranges = parse_ranges(j.at("data_ranges"), "dataset.data_ranges");
  dc.physics_ranges = parse_ranges(j.at("physics_ranges"), "dataset.physics_ranges");
  if (j.contains("test_ranges"))
    dc.test_ranges = parse_ranges(j.at("test_ranges"), "dataset.test_ranges");
  auto parse_counts = [&](const char* key, std::vector<int> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    std::vector<int> out;
    if (v.is_number_integer()) {
      out.push_back(v.get<int>());
    } else if (v.is_array()) {
      for (const json& e : v) out.push_back(e.get<int>());
    } else {
      throw ConfigError(std::string("dataset.") + key +
                        " must be an integer or an array of integers");
    }
    return out;
  };
  dc.n_data = parse_counts("n_data", {0});
  dc.n_physics = parse_counts("n_physics", {0});
  dc.n_test = parse_counts("n_test", {0});
  dc.n_bc = j.value("n_bc", 64);
  dc.n_ic = j.value("n_ic", 64);
  dc.n_boundary_data = j.value("n_boundary_data", 0);
  dc.validation_fraction = j.value("validation_fraction", 0.1);
  if (dc.validation_fraction < 0.0 || dc.validation_fraction >= 1.0)
    throw ConfigError("validation_fraction must be in [0, 1)");
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    expect_keys(o, {"nx", "save_interval", "n"}, "dataset.oracle");
    dc.oracle_nx = o.value("nx", 21);
    dc.oracle_save_interval = o.value("save_interval", 1.0);
    dc.oracle_n = o.value("n", 65);
  }
  return dc;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name + ": " + e.what());
  }
  expect_keys(j,
              {"name", "problem", "seed", "out_dir", "network", "loss_weights",
               "optimizer", "dataset", "problem_params", "unknowns",
               "init_overrides"},
              "config");

  ExperimentConfig cfg;
  cfg.name = j.value("name", name);
  if (!j.contains("problem")) throw ConfigError("problem is required");
  cfg.problem = j.at("problem").get<std::string>();
  if (!j.contains("seed")) throw ConfigError("seed is required");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.out_dir = j.value("out_dir", "");
  if (!j.contains("network")) throw ConfigError("network is required");
  cfg.network = parse_network(j.at("network"));
  if (j.contains("loss_weights")) {
    const json& w = j.at("loss_weights");
    expect_keys(w, {"data", "pde", "bc", "ic"}, "loss_weights");
    cfg.weights.data = w.value("data", 1.0);
    cfg.weights.pde = w.value("pde", 1.0);
    cfg.weights.bc = w.value("bc", 1.0);
    cfg.weights.ic = w.value("ic", 1.0);
    if (cfg.weights.data < 0 || cfg.weights.pde < 0 || cfg.weights.bc < 0 ||
        cfg.weights.ic < 0)
      throw ConfigError("loss weights must be nonnegative");
    if (cfg.weights.data + cfg.weights.pde + cfg.weights.bc + cfg.weights.ic <= 0)
      throw ConfigError("at least one loss weight must be positive");
  }
  if (!j.contains("optimizer")) throw ConfigError("optimizer is required");
  cfg.optimizer = parse_optimizer(j.at("optimizer"));
  if (!j.contains("dataset")) throw ConfigError("dataset is required");
  cfg.dataset = parse_dataset(j.at("dataset"));
  if (j.contains("problem_params")) {
    for (auto it = j.at("problem_params").begin(); it != j.at("problem_params").end();
         ++it)
      cfg.problem_params[it.key()] = it.value().get<double>();
  }
  if (j.contains("unknowns")) {
    for (auto it = j.at("unknowns").begin(); it != j.at("unknowns").end(); ++it) {
      expect_keys(it.value(), {"init", "true"}, "unknowns." + it.key());
      UnknownConfig u;
      u.init = it.value().value("init", 1.0);
      if (it.value().contains("true")) {
        u.has_truth = true;
        u.truth = it.value().at("true").get<double>();
      }
      cfg.unknowns[it.key()] = u;
    }
  }
  if (j.contains("init_overrides")) {
    for (auto it = j.at("init_overrides").begin(); it != j.at("init_overrides").end();
         ++it)
      cfg.init_overrides[it.key()] = it.value().get<double>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).stem().string());
}

}  // namespace pafnet
