#include "anderson_lab/spectral/products.hpp"

#include "anderson_lab/spectral/fft.hpp"

namespace anderson_lab::spectral {

PaddedSpace::PaddedSpace(const TorusGrid& grid) : grid_(grid), m_(3 * grid.n() / 2) {}

std::vector<Complex> PaddedSpace::to_physical(const SpectralField& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch();
  std::vector<Complex> data(static_cast<std::size_t>(m_) * m_);
  const auto wrap = [this](int k) { return ((k % m_) + m_) % m_; };
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Wavevector k = grid_.wavevector(i);
    if (grid_.is_nyquist(k)) continue;
    data[static_cast<std::size_t>(wrap(k.k1)) * m_ + wrap(k.k2)] = f.coeffs()[i];
  }
  fft::synthesize(m_, data);
  return data;
}

SpectralField PaddedSpace::to_field(std::vector<Complex> values, bool real) const {
  fft::analyze(m_, values);
  SpectralField out(grid_, real);
  const auto wrap = [this](int k) { return ((k % m_) + m_) % m_; };
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Wavevector k = grid_.wavevector(i);
    if (grid_.is_nyquist(k)) continue;
    out.coeffs()[i] = values[static_cast<std::size_t>(wrap(k.k1)) * m_ + wrap(k.k2)];
  }
  return out;
}

SpectralField product(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw GridMismatch();
  const PaddedSpace space(f.grid());
  auto a = space.to_physical(f);
  const auto b = space.to_physical(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return space.to_field(std::move(a), f.is_real() && g.is_real());
}

}  // namespace anderson_lab::spectral
