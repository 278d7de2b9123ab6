#include "anderson_lab/gaussian/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/noise.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/util/parallel.hpp"
#include "anderson_lab/util/stats.hpp"

namespace anderson_lab::gaussian {

using spectral::Complex;
using spectral::FieldRole;
using spectral::GaussianStream;
using spectral::Wavevector;

namespace {

constexpr std::uint64_t kBasisNoiseStream = 1;
constexpr std::uint64_t kGffStream = 2;
constexpr int kChunk = 64;

SpectralField real_coords_to_field(const Basis& b, const TorusGrid& grid, const Eigen::VectorXd& r,
                                   FieldRole role) {
  SpectralField f = b.to_field(grid, b.from_real(r));
  f.set_role(role);
  return f;
}

Eigen::VectorXd agff_real(const SpectralData& s, const Eigen::VectorXd& psi) {
  Eigen::VectorXd a = s.eigenvectors.transpose() * psi;
  for (int n = 0; n < s.size(); ++n) a[n] /= std::sqrt(s.shifted(n));
  return s.eigenvectors * a;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

std::vector<double> mollified_values(const SpectralField& f, const Mollifier& m) {
  return spectral::mollify(f, m).values();
}

}  // namespace

SpectralField sample_gff(const TorusGrid& grid, double K, std::uint64_t seed) {
  if (!(K > 0.0)) throw std::invalid_argument("sample_gff: mass K must be positive");
  GaussianStream rng(seed, kGffStream);
  SpectralField f(grid, true, FieldRole::gff);
  f.coeff({0, 0}) = rng.normal() / std::sqrt(K);
  const double s = 1.0 / std::sqrt(2.0);
  for (const Wavevector k : spectral::half_plane_modes(grid)) {
    const double re = rng.normal();
    const double im = rng.normal();
    f.set_mode(k, s * Complex(re, im) / std::sqrt(k.norm2() + K));
  }
  return f;
}

Eigen::VectorXd basis_white_noise(const Basis& basis, std::uint64_t seed) {
  GaussianStream rng(seed, kBasisNoiseStream);
  Eigen::VectorXd psi(basis.size());
  for (int p = 0; p < basis.size(); ++p) psi[p] = rng.normal();
  return psi;
}

TorusGrid field_grid(const SpectralData& s) {
  return TorusGrid(s.grid_n > 0 ? s.grid_n : anderson::default_grid(s.basis.k_max()));
}

Eigen::VectorXd agff_coordinates(const SpectralData& s, std::uint64_t seed) {
  Eigen::VectorXd a = s.eigenvectors.transpose() * basis_white_noise(s.basis, seed);
  for (int n = 0; n < s.size(); ++n) a[n] /= std::sqrt(s.shifted(n));
  return a;
}

SpectralField sample_agff(const SpectralData& s, std::uint64_t seed) {
  return real_coords_to_field(s.basis, field_grid(s), agff_real(s, basis_white_noise(s.basis, seed)),
                              FieldRole::agff);
}

CoupledPair coupled_sample(const SpectralData& s, std::uint64_t seed) {
  const TorusGrid grid = field_grid(s);
  const double mass = s.shift_K + s.mass;
  Eigen::VectorXd psi = basis_white_noise(s.basis, seed);
  Eigen::VectorXd g(psi.size());
  for (int p = 0; p < s.basis.size(); ++p) {
    g[p] = psi[p] / std::sqrt(s.basis.real_modes()[p].k.norm2() + mass);
  }
  const Eigen::VectorXd a = agff_real(s, psi);
  CoupledPair out{std::move(psi),
                  real_coords_to_field(s.basis, grid, g, FieldRole::gff),
                  real_coords_to_field(s.basis, grid, a, FieldRole::agff),
                  real_coords_to_field(s.basis, grid, a - g, FieldRole::coupling_shift),
                  mass,
                  s.basis.k_max(),
                  seed};
  return out;
}

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: negative order");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_constant(const Mollifier& m, double mass, int k_max) {
  return spectral::renorm_constant_disc(m, k_max, mass);
}

double wick_constant(const Mollifier& m, double mass, const TorusGrid& grid) {
  return spectral::renorm_constant(m, grid, mass).value;
}

std::vector<double> wick_values(const std::vector<double>& values, int order, double c) {
  if (order < 0) throw std::invalid_argument("wick_values: negative order");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    // c^{n/2} He_n(x / sqrt c) = x P_{n-1} - (n-1) c P_{n-2}
    double prev = 1.0, cur = x;
    if (order == 0) cur = 1.0;
    for (int k = 1; k < order; ++k) {
      const double next = x * cur - k * c * prev;
      prev = cur;
      cur = next;
    }
    out[i] = cur;
  }
  return out;
}

WickField wick_power_gff(const SpectralField& field, int order, const Mollifier& m, double K, int k_max) {
  const double c = k_max < 0 ? wick_constant(m, K, field.grid()) : wick_constant(m, K, k_max);
  WickField w{order, m.epsilon(), c, std::nullopt,
              SpectralField::from_values(field.grid(), wick_values(mollified_values(field, m), order, c),
                                         FieldRole::wick_power)};
  return w;
}

PseudoWick pseudo_wick_agff(const CoupledPair& pair, int order, const Mollifier& m) {
  const double c = wick_constant(m, pair.mass, pair.k_max);
  const TorusGrid& grid = pair.phi_A.grid();
  const auto a = mollified_values(pair.phi_A, m);
  const auto g = mollified_values(pair.phi_G, m);
  const auto h = mollified_values(pair.h, m);

  std::vector<double> sum(a.size(), 0.0);
  std::vector<double> hpow(a.size(), 1.0);
  for (int k = order; k >= 0; --k) {
    const auto wk = wick_values(g, k, c);
    const double coef = binomial(order, k);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += coef * wk[i] * hpow[i];
    for (std::size_t i = 0; i < sum.size(); ++i) hpow[i] *= h[i];
  }
  PseudoWick out{
      {order, m.epsilon(), c, std::nullopt,
       SpectralField::from_values(grid, wick_values(a, order, c), FieldRole::wick_power)},
      {order, m.epsilon(), c, std::nullopt, SpectralField::from_values(grid, sum, FieldRole::wick_power)}};
  return out;
}

std::vector<double> agff_variance_profile(const SpectralData& s, const Mollifier& m) {
  const TorusGrid grid = field_grid(s);
  std::vector<double> acc(grid.size(), 0.0);
  for (int n = 0; n < s.size(); ++n) {
    const auto f = mollified_values(s.eigenfunction_field(n, grid), m);
    const double w = 1.0 / s.shifted(n);
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += w * f[x] * f[x];
  }
  return acc;
}

WickComparison wick_comparison_profile(const SpectralData& s, const Mollifier& m, int samples,
                                       std::uint64_t seed_base) {
  if (samples < 2) throw std::invalid_argument("wick_comparison_profile: need at least two samples");
  WickComparison out;
  out.grid = field_grid(s);
  out.samples = samples;
  out.c_eps = wick_constant(m, s.shift_K + s.mass, s.basis.k_max());
  out.exact = agff_variance_profile(s, m);
  for (double& v : out.exact) v -= out.c_eps;

  const std::size_t points = out.grid.size();
  const int chunks = (samples + kChunk - 1) / kChunk;
  struct Partial {
    std::vector<double> s1, s2;
  };
  const auto partials = util::parallel_map<Partial>(chunks, [&](std::size_t c) {
    Partial p{std::vector<double>(points, 0.0), std::vector<double>(points, 0.0)};
    const int lo = static_cast<int>(c) * kChunk;
    const int hi = std::min(samples, lo + kChunk);
    for (int i = lo; i < hi; ++i) {
      const auto v = mollified_values(sample_agff(s, spectral::stream_key(seed_base, i)), m);
      for (std::size_t x = 0; x < points; ++x) {
        const double y = v[x] * v[x] - out.c_eps;
        p.s1[x] += y;
        p.s2[x] += y * y;
      }
    }
    return p;
  });
  out.monte_carlo.assign(points, 0.0);
  out.std_error.assign(points, 0.0);
  for (std::size_t x = 0; x < points; ++x) {
    util::CompensatedSum s1, s2;
    for (const auto& p : partials) {
      s1.add(p.s1[x]);
      s2.add(p.s2[x]);
    }
    const double mean = s1.value() / samples;
    const double var = std::max(0.0, (s2.value() - samples * mean * mean) / (samples - 1));
    out.monte_carlo[x] = mean;
    out.std_error[x] = std::sqrt(var / samples);
  }
  return out;
}

ShiftProfile shift_regularity_profile(const CoupledPair& pair, double alpha) {
  ShiftProfile out;
  const int k_max = pair.k_max;
  const int top = spectral::max_block_for_radius(k_max);
  double running = 0.0;
  for (int j = -1; j <= top; ++j) {
    const double e = std::pow(2.0, 2.0 * alpha * j) * std::pow(spectral::lp_block(pair.h, j).l2_norm(), 2);
    running += e;
    out.blocks.push_back(j);
    out.energy.push_back(e);
    out.partial_sums.push_back(running);
    if (j >= 1 && (8.0 / 3.0) * std::ldexp(1.0, j) <= k_max) out.tail_blocks.push_back(j);
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    const int j = out.blocks[i];
    if (std::find(out.tail_blocks.begin(), out.tail_blocks.end(), j) == out.tail_blocks.end()) continue;
    if (out.energy[i] <= 0.0) continue;
    x.push_back(j);
    y.push_back(std::log2(out.energy[i]));
  }
  out.tail_slope = x.size() >= 2 ? util::fitted_slope(x, y) : 0.0;
  return out;
}

double scale_energy_correlation(const std::vector<CoupledPair>& pairs, int j, int i) {
  std::vector<double> a, b;
  for (const auto& p : pairs) {
    a.push_back(std::pow(spectral::lp_block(p.phi_G, j).l2_norm(), 2));
    b.push_back(std::pow(spectral::lp_block(p.h, i).l2_norm(), 2));
  }
  const double ma = util::mean(a), mb = util::mean(b);
  util::CompensatedSum sab, saa, sbb;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab.add((a[k] - ma) * (b[k] - mb));
    saa.add((a[k] - ma) * (a[k] - ma));
    sbb.add((b[k] - mb) * (b[k] - mb));
  }
  const double den = std::sqrt(saa.value() * sbb.value());
  return den > 0.0 ? sab.value() / den : 0.0;
}

}  // namespace anderson_lab::gaussian
