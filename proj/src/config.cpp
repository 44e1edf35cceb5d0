#include "pdss/config.hpp"

#include <fstream>

#include "json.hpp"

namespace pdss {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
  };
  if (problem != "example" && problem != "qp") {
    fail("problem", "unknown problem id '" + problem + "'");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) fail("alpha", "must lie in [0, 1)");
  for (double b : beta) {
    if (!(b >= 0.0 && b < 1.0)) fail("beta", "entries must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) fail("epsilon", "must be > 0");
  if (schedule.kind != "constant" && schedule.kind != "decaying") {
    fail("schedule.kind", "must be 'constant' or 'decaying'");
  }
  if (schedule.gamma && !(*schedule.gamma > 0.0)) fail("schedule.gamma", "must be > 0");
  if (schedule.c && !(*schedule.c > 0.0)) fail("schedule.c", "must be > 0");
  if (schedule.kind == "decaying" && !(schedule.p > 0.5 && schedule.p <= 1.0)) {
    fail("schedule.p", "must lie in (0.5, 1]");
  }
  if (seeds.empty()) fail("seeds", "at least one seed required");
  if (replicas < 1) fail("replicas", "must be >= 1");
  if (eval_samples == 0) fail("eval_samples", "must be >= 1");
  if (x1_dist_sq && !(*x1_dist_sq >= 0.0)) fail("x1_dist_sq", "must be >= 0");
  if (!(z_norm_bound >= 0.0)) fail("z_norm_bound", "must be >= 0");
  auto check_grid = [&](const std::optional<Vec>& grid, const char* field) {
    if (!grid) return;
    if (grid->empty()) fail(field, "must not be empty when given");
    for (double v : *grid) {
      if (!(v >= 0.0 && v < 1.0)) fail(field, "entries must lie in [0, 1)");
    }
  };
  check_grid(alpha_grid, "alpha_grid");
  check_grid(beta_grid, "beta_grid");
  if (!(tau > 0.0)) fail("tau", "must be > 0");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig c;
  read_field(j, "problem", c.problem);
  read_field(j, "alpha", c.alpha);
  read_field(j, "beta", c.beta);
  read_field(j, "epsilon", c.epsilon);
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    read_field(s, "kind", c.schedule.kind);
    read_optional(s, "gamma", c.schedule.gamma);
    read_field(s, "iterations", c.schedule.iterations);
    read_optional(s, "c", c.schedule.c);
    read_field(s, "p", c.schedule.p);
  }
  read_field(j, "seeds", c.seeds);
  read_field(j, "replicas", c.replicas);
  read_field(j, "out_dir", c.out_dir);
  read_field(j, "eval_samples", c.eval_samples);
  read_field(j, "snapshots", c.snapshots);
  read_field(j, "eval_points", c.eval_points);
  read_optional(j, "x1_dist_sq", c.x1_dist_sq);
  read_field(j, "z_norm_bound", c.z_norm_bound);
  read_optional(j, "alpha_grid", c.alpha_grid);
  read_optional(j, "beta_grid", c.beta_grid);
  read_field(j, "eval_seed", c.eval_seed);
  read_field(j, "tau", c.tau);
  read_optional(j, "eval_x", c.eval_x);
  c.validate();
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json s{{"kind", c.schedule.kind},
         {"iterations", c.schedule.iterations},
         {"p", c.schedule.p}};
  if (c.schedule.gamma) s["gamma"] = *c.schedule.gamma;
  if (c.schedule.c) s["c"] = *c.schedule.c;

  json j{{"problem", c.problem},
         {"alpha", c.alpha},
         {"beta", c.beta},
         {"epsilon", c.epsilon},
         {"schedule", s},
         {"seeds", c.seeds},
         {"replicas", c.replicas},
         {"out_dir", c.out_dir},
         {"eval_samples", c.eval_samples},
         {"snapshots", c.snapshots},
         {"eval_points", c.eval_points},
         {"z_norm_bound", c.z_norm_bound},
         {"eval_seed", c.eval_seed},
         {"tau", c.tau}};
  if (c.x1_dist_sq) j["x1_dist_sq"] = *c.x1_dist_sq;
  if (c.alpha_grid) j["alpha_grid"] = *c.alpha_grid;
  if (c.beta_grid) j["beta_grid"] = *c.beta_grid;
  if (c.eval_x) j["eval_x"] = *c.eval_x;
  return j.dump(2);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path.string());
  out << serialize_config(config) << "\n";
}

}  // namespace pdss
