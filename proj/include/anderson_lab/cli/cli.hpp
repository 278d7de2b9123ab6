#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace anderson_lab::cli {

/// Invalid configuration; key() names the offending entry.
struct ConfigError : std::runtime_error {
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Typed view of the flat JSON configuration. See default_config() for the
/// keys and README.md for their meaning.
struct RunConfig {
  std::string experiment;
  std::string outdir;
  std::uint64_t seed = 0;

  int grid_n = 0;
  int k_max = 12;
  double eps = 0.2;
  std::string mollifier = "gaussian";
  double coupling = 1.0;
  std::string counterterm = "basis";
  double mass = 1.0;

  int galerkin_N = 30;
  double dt = 1e-3;
  double T = 1.0;
  double t_evolve = 0.5;
  int n_samples = 2000;
  bool focusing = false;

  std::string gibbs_variant = "quartic_only";
  std::string sampler = "metropolis";
  int thin = 10;
  std::string wick_reference = "agff_profile";
  bool disable_interaction = false;
  std::vector<int> observable_modes{1, 2, 5, 10};
  int batches = 20;

  int wick_order = 2;
  double shift_alpha = 0.9;

  int p = 4;
  double delta = 0.1;
  double local_T = 0.0;
  int time_points = 11;
  int tail_order = 2;
  int tail_samples = 10000;
  std::vector<double> thresholds;

  std::vector<int> galerkin_ranks{24, 48, 96, 192};
  std::vector<double> dynamics_eps{0.4, 0.2, 0.1};
  std::vector<double> resolvent_eps{0.4, 0.2, 0.1, 0.05};
  std::vector<double> wick_eps{0.4, 0.2, 0.1, 0.05};
  int dynamics_rank = 30;
  int wick_samples = 8;
  int converge_k_max = 16;
  double sobolev_exponent = -0.1;
};

[[nodiscard]] nlohmann::json default_config();

/// Checks keys, types and admissible ranges; throws ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& merged);
[[nodiscard]] nlohmann::json to_json(const RunConfig& c);

/// Applies "key=value" overrides; values parse as JSON and fall back to a
/// plain string.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& sets);

/// Reads a JSON object from file and merges it over the defaults.
[[nodiscard]] nlohmann::json load_config(const std::optional<std::filesystem::path>& path);

struct Diagnostic {
  std::string rule;
  std::string message;
};

/// Cross-field checks (time step rule, dealiasing, rank limits) without
/// running any experiment.
[[nodiscard]] std::vector<Diagnostic> validate(const RunConfig& c);

[[nodiscard]] const std::vector<std::string>& subcommands();

struct RunOptions {
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outdir;
  std::optional<unsigned> threads;
  std::vector<std::string> sets;
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path run_dir;
  std::string message;
};

/// Lowercase hex SHA-256.
[[nodiscard]] std::string sha256_hex(const std::string& bytes);
[[nodiscard]] std::string file_sha256(const std::filesystem::path& p);

/// Executes a subcommand. Exit codes: 0 success, 2 failed verdict, 1 error.
[[nodiscard]] RunResult run(const RunOptions& opts, std::ostream& log);

}  // namespace anderson_lab::cli
