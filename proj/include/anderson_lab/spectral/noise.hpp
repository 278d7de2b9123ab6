#pragma once

#include <cstdint>

#include "anderson_lab/spectral/mollifier.hpp"
#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::spectral {

/// Spatial white noise: one complex Gaussian with E|xi(k)|^2 = 1 per
/// conjugate pair, a real N(0,1) at k = 0, Nyquist modes zeroed.
[[nodiscard]] SpectralField sample_white_noise(const TorusGrid& grid, std::uint64_t seed);

/// Lattice counterterm sum_k |rho(k)|^2 / (|k|^2 + mass) over resolved modes,
/// with a bound on the part of the sum beyond the grid.
struct RenormConstant {
  double value = 0.0;
  double tail_bound = 0.0;
  /// Set when tail_bound exceeds 1e-12 * value.
  bool tail_warning = false;
};

[[nodiscard]] RenormConstant renorm_constant(const Mollifier& m, const TorusGrid& grid,
                                             double mass = 1.0);

/// Same sum restricted to |k| <= k_max (a Galerkin disc basis).
[[nodiscard]] double renorm_constant_disc(const Mollifier& m, int k_max, double mass = 1.0);

/// (1 - Delta)^{-1}.
[[nodiscard]] SpectralField greens(const SpectralField& f);

/// Noise together with its mollification and renormalized resonant square
/// Xi^2 = (1 - Delta)^{-1} xi_eps o xi_eps - c_eps.
struct EnhancedNoise {
  SpectralField xi;
  SpectralField xi_eps;
  SpectralField xi2_eps;
  double c_eps = 0.0;
  Mollifier mollifier;
  std::uint64_t seed = 0;

  [[nodiscard]] const TorusGrid& grid() const { return xi.grid(); }
};

[[nodiscard]] EnhancedNoise build_enhanced(const SpectralField& xi, const Mollifier& m,
                                           std::uint64_t seed = 0);

}  // namespace anderson_lab::spectral
