#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "anderson_lab/spectral/noise.hpp"
#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::paracontrolled {

using spectral::EnhancedNoise;
using spectral::SpectralField;

/// Cutoff value for which Pi_{>N} keeps every nonzero mode. Paraproducts carry
/// no zero mode, so this reproduces the untruncated ansatz.
inline constexpr int kNoCutoff = -1;

struct NoContraction : std::runtime_error {
  explicit NoContraction(const std::string& what) : std::runtime_error(what) {}
};

/// Q(u) = xi > u + xi < u - Xi^2 > u.
[[nodiscard]] SpectralField ansatz_source(const SpectralField& u, const EnhancedNoise& noise);

/// Pi_{>N} (1 - Delta)^{-1} Q(u).
[[nodiscard]] SpectralField ansatz_correction(const SpectralField& u, const EnhancedNoise& noise,
                                              int cutoff_N);

/// u together with its remainder u_sharp = u + Pi_{>N} (1 - Delta)^{-1} Q(u).
struct ParacontrolledFunction {
  SpectralField u;
  SpectralField u_sharp;
  int cutoff_N = kNoCutoff;
  /// Fixed-point iterations used when built by gamma_map (0 otherwise).
  int iterations = 0;
  /// L2 residual of u - (u_sharp - Pi_{>N} G Q(u)).
  double residual = 0.0;
};

/// Builds the pair directly from u.
[[nodiscard]] ParacontrolledFunction make_paracontrolled(const SpectralField& u,
                                                         const EnhancedNoise& noise,
                                                         int cutoff_N = kNoCutoff);

/// Solves u = v - Pi_{>N} G Q(u) by plain iteration from u = v.
/// Throws NoContraction if the relative step does not fall below 1e-12
/// within 200 iterations.
[[nodiscard]] ParacontrolledFunction gamma_map(const SpectralField& v, const EnhancedNoise& noise,
                                               int cutoff_N);

/// Same with cutoff_N = default_cutoff(noise).
[[nodiscard]] ParacontrolledFunction gamma_map(const SpectralField& v, const EnhancedNoise& noise);

/// Phi_N(u) = u + Pi_{>N} G Q(u).
[[nodiscard]] SpectralField phi_map(const SpectralField& u, const EnhancedNoise& noise, int cutoff_N);
[[nodiscard]] SpectralField phi_map(const ParacontrolledFunction& u, const EnhancedNoise& noise);

/// Ratio |T^2 p| / |T p| for T = Pi_{>N} G Q and probe p, the step ratio of
/// the first fixed-point iteration started at p.
[[nodiscard]] double contraction_factor(const EnhancedNoise& noise, int cutoff_N,
                                        const SpectralField& probe);

/// Same with a smooth probe derived from the noise seed.
[[nodiscard]] double contraction_factor(const EnhancedNoise& noise, int cutoff_N);

/// Smallest N >= -1 whose first-iteration contraction factor is below 1/2.
[[nodiscard]] int default_cutoff(const EnhancedNoise& noise);

/// (1 - Delta) u_sharp + xi o u_sharp - B(u), plus the low-frequency terms
/// Pi_{<=N} Q(u) + xi o Pi_{<=N} G Q(u) when the cutoff is active. Equals
/// (1 - Delta) u + xi u + c u for the dealiased products.
[[nodiscard]] SpectralField apply_paracontrolled_hamiltonian(const ParacontrolledFunction& u,
                                                             const EnhancedNoise& noise);

/// B(u) = Xi^2 < u + Xi^2 o u + C(u, G xi, xi) + [G(u < xi) - u < G xi] o xi
///        + G(xi < u - Xi^2 > u) o xi.
[[nodiscard]] SpectralField b_operator(const SpectralField& u, const EnhancedNoise& noise);

/// (1 - Delta) u + xi u + c u with dealiased products.
[[nodiscard]] SpectralField direct_hamiltonian(const SpectralField& u, const EnhancedNoise& noise);

}  // namespace anderson_lab::paracontrolled
