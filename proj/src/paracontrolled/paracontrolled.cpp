#include "anderson_lab/paracontrolled/paracontrolled.hpp"

#include <cmath>

#include "anderson_lab/paracontrolled/paraproducts.hpp"
#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/products.hpp"
#include "anderson_lab/spectral/random.hpp"

namespace anderson_lab::paracontrolled {

using spectral::greens;
using spectral::high_pass;

namespace {

constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 200;

SpectralField low_pass(const SpectralField& f, int cutoff_N) { return f - high_pass(f, cutoff_N); }

}  // namespace

SpectralField ansatz_source(const SpectralField& u, const EnhancedNoise& noise) {
  SpectralField q = para_greater(noise.xi_eps, u);
  q += para_less(noise.xi_eps, u);
  q -= para_greater(noise.xi2_eps, u);
  return q;
}

SpectralField ansatz_correction(const SpectralField& u, const EnhancedNoise& noise, int cutoff_N) {
  return high_pass(greens(ansatz_source(u, noise)), cutoff_N);
}

SpectralField phi_map(const SpectralField& u, const EnhancedNoise& noise, int cutoff_N) {
  return u + ansatz_correction(u, noise, cutoff_N);
}

SpectralField phi_map(const ParacontrolledFunction& u, const EnhancedNoise& noise) {
  return phi_map(u.u, noise, u.cutoff_N);
}

ParacontrolledFunction make_paracontrolled(const SpectralField& u, const EnhancedNoise& noise,
                                           int cutoff_N) {
  return {u, phi_map(u, noise, cutoff_N), cutoff_N, 0, 0.0};
}

ParacontrolledFunction gamma_map(const SpectralField& v, const EnhancedNoise& noise, int cutoff_N) {
  const double scale = std::max(v.l2_norm(), 1e-300);
  SpectralField u = v;
  for (int it = 1; it <= kMaxIterations; ++it) {
    SpectralField next = v - ansatz_correction(u, noise, cutoff_N);
    const double step = (next - u).l2_norm();
    u = std::move(next);
    if (step <= kTolerance * scale) {
      const double residual = (u - (v - ansatz_correction(u, noise, cutoff_N))).l2_norm();
      return {u, v, cutoff_N, it, residual};
    }
    if (!std::isfinite(step)) break;
  }
  throw NoContraction("gamma_map: fixed-point iteration did not converge for cutoff N = " +
                      std::to_string(cutoff_N));
}

ParacontrolledFunction gamma_map(const SpectralField& v, const EnhancedNoise& noise) {
  return gamma_map(v, noise, default_cutoff(noise));
}

double contraction_factor(const EnhancedNoise& noise, int cutoff_N, const SpectralField& probe) {
  const SpectralField t1 = ansatz_correction(probe, noise, cutoff_N);
  const double n1 = t1.l2_norm();
  if (n1 == 0.0) return 0.0;
  return ansatz_correction(t1, noise, cutoff_N).l2_norm() / n1;
}

double contraction_factor(const EnhancedNoise& noise, int cutoff_N) {
  const auto white = spectral::sample_white_noise(noise.grid(), spectral::stream_key(noise.seed, 0xC0FFEE));
  return contraction_factor(noise, cutoff_N, greens(white));
}

int default_cutoff(const EnhancedNoise& noise) {
  const SpectralField probe =
      greens(spectral::sample_white_noise(noise.grid(), spectral::stream_key(noise.seed, 0xC0FFEE)));
  const int top = spectral::max_block(noise.grid());
  for (int n = kNoCutoff; n <= top; ++n) {
    if (contraction_factor(noise, n, probe) < 0.5) return n;
  }
  throw NoContraction("default_cutoff: no cutoff gives a contraction factor below 1/2");
}

SpectralField b_operator(const SpectralField& u, const EnhancedNoise& noise) {
  const SpectralField& xi = noise.xi_eps;
  const SpectralField& xi2 = noise.xi2_eps;
  const SpectralField g_xi = greens(xi);

  const ProductSplit s = split_product(xi2, u);
  SpectralField b = s.less;
  b += s.res;
  b += commutator(u, g_xi, xi);
  const SpectralField multiplier_comm = greens(para_less(u, xi)) - para_less(u, g_xi);
  b += resonant(multiplier_comm, xi);
  b += resonant(greens(para_less(xi, u) - s.greater), xi);
  return b;
}

SpectralField apply_paracontrolled_hamiltonian(const ParacontrolledFunction& u,
                                               const EnhancedNoise& noise) {
  SpectralField h = bessel_potential(u.u_sharp, 1.0);
  h += resonant(noise.xi_eps, u.u_sharp);
  h -= b_operator(u.u, noise);
  const SpectralField low = low_pass(ansatz_source(u.u, noise), u.cutoff_N);
  if (low.l2_norm() > 0.0) {
    h += low;
    h += resonant(noise.xi_eps, greens(low));
  }
  return h;
}

SpectralField direct_hamiltonian(const SpectralField& u, const EnhancedNoise& noise) {
  SpectralField h = bessel_potential(u, 1.0);
  h += spectral::product(noise.xi_eps, u);
  h.axpy(noise.c_eps, u);
  return h;
}

}  // namespace anderson_lab::paracontrolled
