#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/spectral/mollifier.hpp"

namespace anderson_lab::gibbs {

using anderson::SpectralData;
using spectral::Mollifier;
using spectral::SpectralField;
using spectral::TorusGrid;

struct DegenerateWeights : std::runtime_error {
  explicit DegenerateWeights(const std::string& w) : std::runtime_error(w) {}
};

/// Variance used for Wick ordering of psi = rho_eps * P_{<=N} u.
enum class WickReference {
  /// a(x) = sum_{n<N} (rho_eps * f_n)(x)^2 / (lambda_n + K + 1)
  agff_profile,
  /// flat GFF constant over the basis disc with mass K + 1
  gff_constant,
};

[[nodiscard]] WickReference parse_wick_reference(const std::string& s);
[[nodiscard]] std::string to_string(WickReference r);

/// Wick-ordered quartic potential on the first N eigenmodes of S. Functions
/// take eigen-coordinates u (at least N entries; later entries are ignored).
/// Integrals are grid averages, exact for the degrees involved because the
/// grid carries more than 4 k_max points per direction.
class QuarticPotential {
 public:
  /// N <= 0 selects every eigenmode.
  QuarticPotential(const SpectralData& s, const Mollifier& m, int N,
                   WickReference reference = WickReference::agff_profile);

  [[nodiscard]] int rank() const { return rank_; }
  [[nodiscard]] const TorusGrid& grid() const { return grid_; }
  [[nodiscard]] double epsilon() const { return eps_; }
  [[nodiscard]] WickReference reference() const { return reference_; }
  /// Wick variance a(x) on the grid.
  [[nodiscard]] const std::vector<double>& profile() const { return profile_; }
  /// a_agff(x) - c_gff, the gap between the two references.
  [[nodiscard]] const std::vector<double>& reference_gap() const { return gap_; }
  /// (rho_eps * f_n)(x) for n < rank, one column per mode.
  [[nodiscard]] const Eigen::MatrixXd& mode_values() const { return modes_; }

  [[nodiscard]] Eigen::VectorXd smoothed(const Eigen::VectorXd& u) const;
  /// 1/4 int :psi^4: dx
  [[nodiscard]] double quartic(const Eigen::VectorXd& u) const;
  /// int :psi^2: dx
  [[nodiscard]] double wick_square(const Eigen::VectorXd& u) const;
  /// -<:psi^3:, rho_eps * f_n> for n < rank (the negative gradient of quartic).
  [[nodiscard]] Eigen::VectorXd force(const Eigen::VectorXd& u) const;
  /// quartic(0) = 3/4 int a^2
  [[nodiscard]] double ground_value() const;
  /// -(3/2) int a^2, the minimum of the Hermite quartic.
  [[nodiscard]] double lower_bound() const;

 private:
  int rank_;
  double eps_;
  WickReference reference_;
  TorusGrid grid_;
  Eigen::MatrixXd modes_;
  std::vector<double> profile_;
  std::vector<double> gap_;
  double a2_ = 0.0;
};

enum class Variant {
  /// V = 1/4 int :psi^4:
  quartic_only,
  /// V = 1/4 int :psi^4: - (K/2) int :psi^2:
  quartic_plus_K,
};

[[nodiscard]] Variant parse_variant(const std::string& s);
[[nodiscard]] std::string to_string(Variant v);

struct GibbsWeight {
  double log_weight = 0.0;  // -V
  double interaction_V = 0.0;
  Variant variant = Variant::quartic_only;
};

/// Interaction of eigen-coordinates u under a prepared potential. K is taken
/// from the potential's operator.
[[nodiscard]] GibbsWeight interaction(const QuarticPotential& pot, double K, const Eigen::VectorXd& u,
                                      Variant variant = Variant::quartic_only);
/// Interaction of a field on S's basis.
[[nodiscard]] GibbsWeight interaction(const SpectralField& field, const SpectralData& s, const Mollifier& m,
                                      int N, Variant variant = Variant::quartic_only);

enum class SamplerMode { metropolis, importance };

struct GibbsOptions {
  Variant variant = Variant::quartic_only;
  SamplerMode mode = SamplerMode::metropolis;
  /// Chain steps per kept sample (metropolis only).
  int thin = 1;
  /// Replace V by 0 (the output law is then the AGFF).
  bool disable_interaction = false;
  WickReference reference = WickReference::agff_profile;
};

struct GibbsEnsemble {
  /// Eigen-coordinates of each sample.
  std::vector<Eigen::VectorXd> samples;
  std::vector<GibbsWeight> weights;
  /// Whether the chain step that produced a sample accepted its proposal.
  std::vector<bool> accepted;
  /// (sum w)^2 / sum w^2 over all proposals.
  double effective_sample_size = 0.0;
  double acceptance_rate = 1.0;
  long proposals = 0;
  SamplerMode mode = SamplerMode::metropolis;
  std::uint64_t seed_base = 0;

  [[nodiscard]] int size() const { return static_cast<int>(samples.size()); }
  /// Importance weights normalized to mean 1 (all ones for a metropolis chain).
  [[nodiscard]] std::vector<double> normalized_weights() const;
  [[nodiscard]] SpectralField field(const SpectralData& s, int i) const;
};

/// Proposal i is agff_coordinates(S, stream_key(seed_base, i)).
[[nodiscard]] GibbsEnsemble sample_gibbs(const SpectralData& s, const Mollifier& m, int N, int n_samples,
                                         std::uint64_t seed_base, const GibbsOptions& opts = {});

struct PartitionEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

/// Z = E_mu[exp(-V)] over AGFF draws.
[[nodiscard]] PartitionEstimate partition_estimate(const SpectralData& s, const Mollifier& m, int N, int n_samples,
                                                   std::uint64_t seed_base, Variant variant = Variant::quartic_only,
                                                   bool disable_interaction = false);

/// CSV sample_index,V,log_weight,accepted.
void write_gibbs_csv(std::ostream& os, const GibbsEnsemble& e);
// Binary container "ALGE" (little-endian): magic, u32 version, u32 count,
// u32 dimension, u8 mode, u8[3] reserved, u64 seed_base, f64 ESS,
// f64 acceptance rate, then per sample f64 V, f64 log_weight, u8 accepted,
// f64 coordinates[dimension].
void write_gibbs_ensemble(std::ostream& os, const GibbsEnsemble& e);
[[nodiscard]] GibbsEnsemble read_gibbs_ensemble(std::istream& is);
void write_gibbs_ensemble_file(const std::filesystem::path& p, const GibbsEnsemble& e);
[[nodiscard]] GibbsEnsemble read_gibbs_ensemble_file(const std::filesystem::path& p);

}  // namespace anderson_lab::gibbs
