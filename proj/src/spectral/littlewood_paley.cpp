#include "anderson_lab/spectral/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anderson_lab::spectral {
namespace {

constexpr double kInner = 0.75;
constexpr double kOuter = 4.0 / 3.0;

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double lp_chi(double r) {
  if (r <= kInner) return 1.0;
  if (r >= kOuter) return 0.0;
  return smooth_step((kOuter - r) / (kOuter - kInner));
}

double lp_symbol(int j, double r) {
  if (j < -1) return 0.0;
  if (j == -1) return lp_chi(r);
  return lp_chi(std::ldexp(r, -j - 1)) - lp_chi(std::ldexp(r, -j));
}

double lp_low_symbol(int j, double r) {
  if (j <= -1) return 0.0;
  return lp_chi(std::ldexp(r, -j));
}

int max_block_for_radius(double radius) {
  int j = -1;
  while (kInner * std::ldexp(1.0, j + 1) < radius) ++j;
  return j;
}

int max_block(const TorusGrid& grid) { return max_block_for_radius(grid.max_resolved_norm()); }

SpectralField lp_block(const SpectralField& f, int j) {
  if (j < -1) throw std::invalid_argument("lp_block: block index must be >= -1");
  return f.multiplied([j](Wavevector k) { return lp_symbol(j, std::sqrt(double(k.norm2()))); });
}

SpectralField lp_low(const SpectralField& f, int j) {
  return f.multiplied([j](Wavevector k) { return lp_low_symbol(j, std::sqrt(double(k.norm2()))); });
}

std::vector<double> block_norms(const SpectralField& f, Exponent p) {
  std::vector<double> out;
  const int top = max_block(f.grid());
  for (int j = -1; j <= top; ++j) {
    const SpectralField b = lp_block(f, j);
    out.push_back(p == Exponent::two ? b.l2_norm() : b.max_norm());
  }
  return out;
}

double besov_norm(const SpectralField& f, double s, Exponent p, Exponent q) {
  const auto norms = block_norms(f, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const int j = static_cast<int>(i) - 1;
    const double w = std::pow(2.0, j * s) * norms[i];
    acc = q == Exponent::two ? acc + w * w : std::max(acc, w);
  }
  return q == Exponent::two ? std::sqrt(acc) : acc;
}

}  // namespace anderson_lab::spectral
