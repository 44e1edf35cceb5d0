#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "pdss/vec.hpp"

namespace pdss {

/// Raised by configuration parsing/validation; maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduleConfig {
  std::string kind = "constant";     // "constant" | "decaying"
  std::optional<double> gamma;       // constant step scale; absent -> tuned
  std::uint64_t iterations = 0;      // K; 0 with --long -> tuned k_star
  std::optional<double> c;           // decaying numerator; absent -> tuned gamma or 1
  double p = 1.0;                    // decaying exponent
};

/// Experiment description shared by every subcommand. Round-trips through
/// JSON losslessly.
struct ExperimentConfig {
  std::string problem = "example";   // "example" | "qp"
  double alpha = 0.3;
  Vec beta = {0.2};
  double epsilon = 5e-3;
  ScheduleConfig schedule;
  std::vector<std::uint64_t> seeds = {1};
  int replicas = 1;
  std::string out_dir = "results";
  std::size_t eval_samples = 1'000'000;
  std::size_t snapshots = 1000;
  std::size_t eval_points = 24;      // snapshots evaluated by solve
  std::optional<double> x1_dist_sq;  // overestimate of |x1 - x*|^2 (augmented)
  double z_norm_bound = 2.0;         // overestimate of |z*|
  std::optional<Vec> alpha_grid;     // sweep grid; absent -> 0, 0.1, .., 0.9
  std::optional<Vec> beta_grid;
  std::uint64_t eval_seed = 424242;  // independent of solver seeds
  double tau = 1.0;                  // tail-bound slack factor
  std::optional<Vec> eval_x;         // point for the evaluate subcommand

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

}  // namespace pdss
