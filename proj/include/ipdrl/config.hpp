#pragma once

// Experiment configuration: an INI-style file with sections [game],
// [learner], [experiment] and [sweep]. See README.md for every key.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipdrl/mbrn.hpp"

namespace ipdrl {

/// Invalid or unreadable configuration. `key()` names the offending entry
/// (or the file path when the file cannot be read).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class PhaseModeSelection { Analytic, Network, Both };

struct ExperimentConfig {
  // [game]
  double temptation = 1.5;
  double sucker = -0.2;

  // [learner]
  double alpha = 0.1;
  double epsilon = 0.1;
  double delta = 0.99;
  std::int64_t batch_size = 4096;

  // [experiment]
  int samples = 100;
  std::int64_t steps = 2'000'000;
  std::int64_t stride = 1000;  // online snapshot stride
  std::int64_t window = 1000;  // online trailing cooperation window
  std::uint64_t seed = 1;
  double init_low = -1.0;
  std::optional<double> init_high;  // 1 / (1 - delta) when unset
  unsigned workers = 0;             // 0 = available parallelism
  std::string out = "results";
  bool force = false;
  int conv_window = 100;
  double conv_tolerance = 1e-9;
  long max_steps = 100'000;
  double threshold = 0.4;

  // [sweep]
  std::vector<double> epsilons;
  std::vector<double> deltas;
  std::vector<double> alphas;
  std::vector<std::int64_t> batch_sizes;
  std::vector<double> robust_alphas;
  std::vector<double> robust_epsilons;
  PhaseModeSelection phase_mode = PhaseModeSelection::Analytic;
  int basin_points = 0;  // 0 disables the WSLS basin sweep

  double effective_init_high() const { return init_high.value_or(1.0 / (1.0 - delta)); }
};

/// Parses a grid: "a, b, c", "linspace(lo, hi, n)" or "logspace(lo, hi, n)"
/// (logspace takes the end points themselves, not exponents).
std::vector<double> parse_grid(const std::string& key, const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Checks every range; throws ConfigError naming the first offending key.
void validate(const ExperimentConfig& config);

}  // namespace ipdrl
