#include "anderson_lab/paracontrolled/paraproducts.hpp"

#include <cmath>
#include <vector>

#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/products.hpp"

namespace anderson_lab::paracontrolled {

using spectral::Complex;
using spectral::PaddedSpace;

namespace {

using Values = std::vector<Complex>;

// Blocks -1..top of f on the padded grid; entry i holds Delta_{i-1} f.
std::vector<Values> padded_blocks(const PaddedSpace& space, const SpectralField& f, int top) {
  std::vector<Values> out;
  out.reserve(static_cast<std::size_t>(top) + 2);
  for (int j = -1; j <= top; ++j) out.push_back(space.to_physical(spectral::lp_block(f, j)));
  return out;
}

void accumulate(Values& acc, const Values& a, const Values& b) {
  for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += a[x] * b[x];
}

struct Blocks {
  PaddedSpace space;
  int top;
  std::vector<Values> f;
  std::vector<Values> g;

  Blocks(const SpectralField& fa, const SpectralField& ga)
      : space(fa.grid()), top(spectral::max_block(fa.grid())) {
    if (!(fa.grid() == ga.grid())) throw spectral::GridMismatch();
    f = padded_blocks(space, fa, top);
    g = padded_blocks(space, ga, top);
  }

  [[nodiscard]] std::size_t count() const { return f.size(); }

  // sum_j S_{j-1} a Delta_j b with S_{j-1} a = sum_{i <= j-2} Delta_i a.
  [[nodiscard]] Values low_high(const std::vector<Values>& a, const std::vector<Values>& b) const {
    const std::size_t len = a.front().size();
    Values acc(len), low(len);
    for (std::size_t jb = 0; jb < count(); ++jb) {
      // block index j = jb - 1; add Delta_{j-2} to the running low sum.
      if (jb >= 2) {
        for (std::size_t x = 0; x < len; ++x) low[x] += a[jb - 2][x];
        accumulate(acc, low, b[jb]);
      }
    }
    return acc;
  }

  [[nodiscard]] Values resonant() const {
    const std::size_t len = f.front().size();
    Values acc(len);
    for (std::size_t j = 0; j < count(); ++j) {
      const std::size_t lo = j == 0 ? 0 : j - 1;
      const std::size_t hi = std::min(count() - 1, j + 1);
      for (std::size_t i = lo; i <= hi; ++i) accumulate(acc, f[i], g[j]);
    }
    return acc;
  }
};

}  // namespace

ProductSplit split_product(const SpectralField& f, const SpectralField& g) {
  const Blocks b(f, g);
  const bool real = f.is_real() && g.is_real();
  return {b.space.to_field(b.low_high(b.f, b.g), real), b.space.to_field(b.resonant(), real),
          b.space.to_field(b.low_high(b.g, b.f), real)};
}

SpectralField para_less(const SpectralField& f, const SpectralField& g) {
  const Blocks b(f, g);
  return b.space.to_field(b.low_high(b.f, b.g), f.is_real() && g.is_real());
}

SpectralField para_greater(const SpectralField& f, const SpectralField& g) {
  return para_less(g, f);
}

SpectralField resonant(const SpectralField& f, const SpectralField& g) {
  const Blocks b(f, g);
  return b.space.to_field(b.resonant(), f.is_real() && g.is_real());
}

SpectralField commutator(const SpectralField& f, const SpectralField& g, const SpectralField& h) {
  return resonant(para_less(f, g), h) - spectral::product(f, resonant(g, h));
}

}  // namespace anderson_lab::paracontrolled
