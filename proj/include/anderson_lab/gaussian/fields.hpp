#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/spectral/mollifier.hpp"
#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::gaussian {

using anderson::Basis;
using anderson::SpectralData;
using spectral::Mollifier;
using spectral::SpectralField;
using spectral::TorusGrid;

/// Gaussian free field with covariance (-Delta + K)^{-1} on every non-Nyquist
/// mode of the grid. Requires K > 0.
[[nodiscard]] SpectralField sample_gff(const TorusGrid& grid, double K, std::uint64_t seed);

/// White noise on the operator basis in real-basis coordinates, one N(0,1)
/// per real mode. Shared by every sampler below so that sample_agff(S, s)
/// equals coupled_sample(S, s).phi_A.
[[nodiscard]] Eigen::VectorXd basis_white_noise(const Basis& basis, std::uint64_t seed);

/// Grid used for fields built from S (the operator's noise grid).
[[nodiscard]] TorusGrid field_grid(const SpectralData& s);

/// Anderson GFF sum_n g_n (lambda_n + K + 1)^{-1/2} f_n.
[[nodiscard]] SpectralField sample_agff(const SpectralData& s, std::uint64_t seed);

/// Eigen-coordinates <phi, f_n> of an AGFF draw.
[[nodiscard]] Eigen::VectorXd agff_coordinates(const SpectralData& s, std::uint64_t seed);

struct CoupledPair {
  Eigen::VectorXd psi;  // real-basis coordinates
  SpectralField phi_G;  // (-Delta + K + 1)^{-1/2} psi
  SpectralField phi_A;  // (H + K + 1)^{-1/2} psi
  SpectralField h;      // phi_A - phi_G
  double mass = 1.0;    // K + 1
  int k_max = 0;
  std::uint64_t seed = 0;
};

[[nodiscard]] CoupledPair coupled_sample(const SpectralData& s, std::uint64_t seed);

/// Probabilists' Hermite polynomial He_n(x).
[[nodiscard]] double hermite(int n, double x);

/// Wick constant sum |rho(k)|^2 / (|k|^2 + mass) over |k| <= k_max.
[[nodiscard]] double wick_constant(const Mollifier& m, double mass, int k_max);
/// Same over the non-Nyquist modes of a grid.
[[nodiscard]] double wick_constant(const Mollifier& m, double mass, const TorusGrid& grid);

/// Wick power c^{M/2} He_M(phi / sqrt c) evaluated pointwise, either with a
/// constant c or with a position-dependent profile.
struct WickField {
  int order = 1;
  double epsilon = 0.0;
  double constant = 0.0;
  std::optional<std::vector<double>> profile;
  SpectralField value;
};

/// Pointwise c^{M/2} He_M(x / sqrt c) for each x in values.
[[nodiscard]] std::vector<double> wick_values(const std::vector<double>& values, int order, double c);

/// Wick power of a mass-K GFF after mollification. k_max < 0 sums the
/// constant over the grid's modes, otherwise over the disc |k| <= k_max.
[[nodiscard]] WickField wick_power_gff(const SpectralField& field, int order, const Mollifier& m, double K,
                                       int k_max = -1);

/// Pseudo-Wick power of phi_A with the GFF constant of phi_G.
struct PseudoWick {
  WickField direct;    // Hermite on phi_A_eps
  WickField binomial;  // sum_k (M choose k) :(phi_G_eps)^k: h_eps^{M-k}
};

[[nodiscard]] PseudoWick pseudo_wick_agff(const CoupledPair& pair, int order, const Mollifier& m);

/// E[(phi_A_eps)^2](x) - c_eps, exact eigen-sum and Monte Carlo estimate.
struct WickComparison {
  double c_eps = 0.0;
  std::vector<double> exact;
  std::vector<double> monte_carlo;
  std::vector<double> std_error;
  int samples = 0;
  TorusGrid grid{4};
};

[[nodiscard]] std::vector<double> agff_variance_profile(const SpectralData& s, const Mollifier& m);
[[nodiscard]] WickComparison wick_comparison_profile(const SpectralData& s, const Mollifier& m, int samples,
                                                     std::uint64_t seed_base);

/// Dyadic energy profile of h: (j, 2^{2 alpha j} |Delta_j h|^2), partial sums
/// and a least-squares slope of log2 energy over the tail blocks.
struct ShiftProfile {
  std::vector<int> blocks;
  std::vector<double> energy;
  std::vector<double> partial_sums;
  double tail_slope = 0.0;
  /// Blocks entering the fit: j >= 1 and block j contained in the basis disc.
  std::vector<int> tail_blocks;
};

[[nodiscard]] ShiftProfile shift_regularity_profile(const CoupledPair& pair, double alpha);

/// Correlation across an ensemble of the block energies |Delta_j phi_G|^2 and
/// |Delta_i h|^2 (reported, not asserted).
[[nodiscard]] double scale_energy_correlation(const std::vector<CoupledPair>& pairs, int j, int i);

}  // namespace anderson_lab::gaussian
