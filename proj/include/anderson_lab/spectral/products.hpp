#pragma once

#include <vector>

#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::spectral {

/// Zero-padded physical space for alias-free quadratic products: fields are
/// embedded on a 3n/2 grid (Nyquist modes dropped), multiplied pointwise, and
/// truncated back to the non-Nyquist modes of the n grid.
class PaddedSpace {
 public:
  explicit PaddedSpace(const TorusGrid& grid);

  [[nodiscard]] const TorusGrid& grid() const { return grid_; }
  [[nodiscard]] int padded_n() const { return m_; }

  /// Point values of f on the padded grid.
  [[nodiscard]] std::vector<Complex> to_physical(const SpectralField& f) const;

  /// Analysis on the padded grid followed by truncation.
  [[nodiscard]] SpectralField to_field(std::vector<Complex> values, bool real = true) const;

 private:
  TorusGrid grid_;
  int m_;
};

/// Dealiased f * g.
[[nodiscard]] SpectralField product(const SpectralField& f, const SpectralField& g);

}  // namespace anderson_lab::spectral
