#include "anderson_lab/spectral/noise.hpp"

#include <cmath>

#include "anderson_lab/paracontrolled/paraproducts.hpp"
#include "anderson_lab/spectral/random.hpp"

namespace anderson_lab::spectral {

SpectralField sample_white_noise(const TorusGrid& grid, std::uint64_t seed) {
  GaussianStream rng(seed, 0);
  SpectralField xi(grid, true, FieldRole::white_noise);
  xi.coeff({0, 0}) = rng.normal();
  const double s = 1.0 / std::sqrt(2.0);
  for (const Wavevector k : half_plane_modes(grid)) {
    const double re = rng.normal();
    const double im = rng.normal();
    xi.set_mode(k, Complex(s * re, s * im));
  }
  return xi;
}

RenormConstant renorm_constant(const Mollifier& m, const TorusGrid& grid, double mass) {
  RenormConstant out;
  const int top = grid.nyquist() - 1;
  for (int k1 = -top; k1 <= top; ++k1) {
    for (int k2 = -top; k2 <= top; ++k2) {
      const double k2n = double(k1) * k1 + double(k2) * k2;
      const double r = m.symbol(k2n);
      out.value += r * r / (k2n + mass);
    }
  }
  // Unresolved modes have max-norm >= n/2; the shell of max-norm s holds
  // 8s points, each with |k|^2 >= s^2.
  for (int s = grid.nyquist();; ++s) {
    const double r = m.symbol(double(s) * s);
    const double term = 8.0 * s * r * r / (double(s) * s + mass);
    out.tail_bound += term;
    if (term < 1e-18 * std::max(out.value, 1e-300) || s > 1'000'000) {
      if (term > 0.0 && s > 1'000'000) out.tail_bound = INFINITY;
      break;
    }
  }
  out.tail_warning = out.tail_bound > 1e-12 * out.value;
  return out;
}

double renorm_constant_disc(const Mollifier& m, int k_max, double mass) {
  double acc = 0.0;
  for (int k1 = -k_max; k1 <= k_max; ++k1) {
    for (int k2 = -k_max; k2 <= k_max; ++k2) {
      const int k2n = k1 * k1 + k2 * k2;
      if (k2n > k_max * k_max) continue;
      const double r = m.symbol(k2n);
      acc += r * r / (k2n + mass);
    }
  }
  return acc;
}

SpectralField greens(const SpectralField& f) {
  return f.multiplied([](Wavevector k) { return 1.0 / (1.0 + k.norm2()); });
}

EnhancedNoise build_enhanced(const SpectralField& xi, const Mollifier& m, std::uint64_t seed) {
  EnhancedNoise out{xi, mollify(xi, m), SpectralField(xi.grid()), 0.0, m, seed};
  out.xi_eps.set_role(FieldRole::mollified_noise);
  out.c_eps = renorm_constant(m, xi.grid()).value;
  out.xi2_eps = paracontrolled::resonant(out.xi_eps, greens(out.xi_eps));
  out.xi2_eps.coeff({0, 0}) -= out.c_eps;
  out.xi2_eps.set_role(FieldRole::resonant_square);
  return out;
}

}  // namespace anderson_lab::spectral
