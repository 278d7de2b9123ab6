#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/gibbs/measure.hpp"

namespace anderson_lab::experiments {

using anderson::SpectralData;
using spectral::Mollifier;

struct Observable {
  std::string name;
  double before = 0.0;
  double after = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool pass = true;
};

/// Least-squares fit reported by an experiment.
struct Fit {
  std::string name;
  double slope = 0.0;
  double std_error = 0.0;
  bool pass = true;
};

/// Long-format series: one (x, y, y_error) point per row.
struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_error;
};

/// Raw per-sample data, written as CSV.
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json config;
  std::vector<Observable> observables;
  std::vector<Fit> fits;
  std::vector<Series> series;
  std::vector<DataTable> tables;
  std::vector<std::string> notes;
  long blowups = 0;
  double runtime_seconds = 0.0;
  std::uint64_t seed_base = 0;

  /// All observables and fits pass and no blow-ups occurred.
  [[nodiscard]] bool verdict() const;
};

/// |z| < 3 rule; z = 0 when both the difference and its error vanish.
[[nodiscard]] double z_score(double difference, double std_error);

[[nodiscard]] nlohmann::json to_json(const ExperimentReport& r);
void write_markdown(std::ostream& os, const ExperimentReport& r);
/// Observables as CSV observable,before,after,std_error,z_score,pass.
void write_observables_csv(std::ostream& os, const ExperimentReport& r);
/// Series in long format series,x,y,y_error.
void write_series_csv(std::ostream& os, const ExperimentReport& r);
void write_table_csv(std::ostream& os, const DataTable& t);

struct InvarianceOptions {
  double dt = 1e-3;
  gibbs::Variant variant = gibbs::Variant::quartic_only;
  gibbs::SamplerMode mode = gibbs::SamplerMode::metropolis;
  int thin = 10;
  /// Gaussian measure and linear flow.
  bool disable_interaction = false;
  /// Batches for the standard error of chain averages.
  int batches = 20;
  /// One-based eigen-indices n of the <u, f_n>^2 observables.
  std::vector<int> modes{1, 2, 5, 10};
};

/// Draw (phi, phi_t) from nu^{N,eps} x white noise, evolve each pair with the
/// Galerkin flow to t_evolve and compare observables before and after with
/// paired z-scores.
[[nodiscard]] ExperimentReport invariance_test(const SpectralData& s, const Mollifier& m, int N, double t_evolve,
                                               int n_samples, std::uint64_t seed_base,
                                               const InvarianceOptions& opts = {});

struct TailOptions {
  int N = 30;
  int p = 4;
  double delta = 0.1;
  /// Time samples of theta on [0, 1].
  int time_points = 11;
};

/// Empirical survival of |theta^{k}|_{L^p_{[0,1]} C^{-k delta}} over the
/// thresholds, with a weighted fit of log-survival against R.
[[nodiscard]] ExperimentReport tail_test(const SpectralData& s, const Mollifier& m, int n_samples, int order,
                                         const std::vector<double>& thresholds, std::uint64_t seed_base,
                                         const TailOptions& opts = {});

struct ConvergenceConfig {
  int k_max = 16;
  int grid_n = 0;
  double eps = 0.2;
  std::uint64_t seed = 0;
  anderson::OperatorOptions operator_options;
  std::vector<int> galerkin_ranks{24, 48, 96, 192};
  std::vector<double> dynamics_eps{0.4, 0.2, 0.1};
  std::vector<double> resolvent_eps{0.4, 0.2, 0.1, 0.05};
  std::vector<double> wick_eps{0.4, 0.2, 0.1, 0.05};
  int dynamics_rank = 30;
  double dt = 1e-3;
  double T = 1.0;
  int wick_order = 2;
  int wick_samples = 8;
  double sobolev_exponent = -0.1;
};

/// Galerkin rank, dynamics mollifier, resolvent and Wick-power refinement
/// studies; each passes when its gaps do not increase. The resolvent study
/// measures against the finest eps (consecutive distances are reported as a
/// series); the others compare consecutive levels. Rates are log-log slopes
/// against the refinement parameter.
[[nodiscard]] ExperimentReport convergence_suite(const ConvergenceConfig& cfg);

}  // namespace anderson_lab::experiments
