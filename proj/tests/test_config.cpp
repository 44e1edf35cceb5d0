#include <filesystem>

#include "doctest.h"
#include "pdss/config.hpp"

using namespace pdss;

namespace {

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.problem == b.problem && a.alpha == b.alpha && a.beta == b.beta &&
         a.epsilon == b.epsilon && a.schedule.kind == b.schedule.kind &&
         a.schedule.gamma == b.schedule.gamma &&
         a.schedule.iterations == b.schedule.iterations &&
         a.schedule.c == b.schedule.c && a.schedule.p == b.schedule.p &&
         a.seeds == b.seeds && a.replicas == b.replicas && a.out_dir == b.out_dir &&
         a.eval_samples == b.eval_samples && a.snapshots == b.snapshots &&
         a.eval_points == b.eval_points && a.x1_dist_sq == b.x1_dist_sq &&
         a.z_norm_bound == b.z_norm_bound && a.alpha_grid == b.alpha_grid &&
         a.beta_grid == b.beta_grid && a.eval_seed == b.eval_seed &&
         a.tau == b.tau && a.eval_x == b.eval_x;
}

}  // namespace

TEST_CASE("config round-trips losslessly") {
  ExperimentConfig config;
  config.problem = "example";
  config.alpha = 0.3;
  config.beta = {0.2};
  config.epsilon = 5e-3;
  config.schedule.kind = "constant";
  config.schedule.gamma = 0.08084745149661551;  // full-precision double
  config.schedule.iterations = 1353821727;
  config.seeds = {1, 2, 3, 4, 5};
  config.replicas = 3;
  config.eval_samples = 1'000'000;
  config.x1_dist_sq = 0.25 + 64.0 / 81.0 + 25.0 / 36.0;
  config.alpha_grid = Vec{0.0, 0.1, 0.2};
  config.beta_grid = Vec{0.0, 0.5};
  config.eval_x = Vec{-0.1929};

  const std::string text = serialize_config(config);
  const ExperimentConfig parsed = parse_config(text);
  CHECK(same_config(config, parsed));

  // a second round trip is bit-identical
  CHECK(serialize_config(parsed) == text);
}

TEST_CASE("config file IO") {
  ExperimentConfig config;
  config.schedule.iterations = 1000;
  const auto path = std::filesystem::temp_directory_path() / "pdss_test_config.json";
  save_config(config, path);
  const ExperimentConfig loaded = load_config(path);
  CHECK(same_config(config, loaded));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), ConfigError);
}

TEST_CASE("config validation points at the offending field") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"alpha": 1.5})"),
                       doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"beta": [0.2, 1.0]})"),
                       doctest::Contains("beta"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"epsilon": 0})"),
                       doctest::Contains("epsilon"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"problem": "unknown"})"),
                       doctest::Contains("problem"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"seeds": []})"),
                       doctest::Contains("seeds"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"schedule": {"kind": "decaying", "p": 0.4}})"),
                       doctest::Contains("schedule.p"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"alpha_grid": [0.5, 1.0]})"),
                       doctest::Contains("alpha_grid"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"alpha": "abc"})"),
                       doctest::Contains("alpha"), ConfigError);
}

TEST_CASE("defaults are sensible") {
  const ExperimentConfig config = parse_config("{}");
  CHECK(config.problem == "example");
  CHECK(config.alpha == 0.3);
  CHECK(config.beta == Vec{0.2});
  CHECK(config.epsilon == 5e-3);
  CHECK(config.schedule.kind == "constant");
  CHECK_FALSE(config.schedule.gamma.has_value());
  CHECK(config.eval_samples == 1'000'000);
  CHECK(config.z_norm_bound == 2.0);
  CHECK_FALSE(config.alpha_grid.has_value());

  // an explicitly empty grid is a config error, unlike an absent one
  CHECK_THROWS_WITH_AS(parse_config(R"({"beta_grid": []})"),
                       doctest::Contains("beta_grid"), ConfigError);
}
