#pragma once

#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::paracontrolled {

using spectral::SpectralField;

/// f < g = sum_j S_{j-1} f Delta_j g (low frequencies of f against high of g).
[[nodiscard]] SpectralField para_less(const SpectralField& f, const SpectralField& g);

/// f > g = g < f.
[[nodiscard]] SpectralField para_greater(const SpectralField& f, const SpectralField& g);

/// f o g = sum_{|i-j| <= 1} Delta_i f Delta_j g.
[[nodiscard]] SpectralField resonant(const SpectralField& f, const SpectralField& g);

/// All three pieces of f * g from a single set of block transforms.
struct ProductSplit {
  SpectralField less;
  SpectralField res;
  SpectralField greater;
};

[[nodiscard]] ProductSplit split_product(const SpectralField& f, const SpectralField& g);

/// C(f, g, h) = (f < g) o h - f (g o h), evaluated from its definition.
[[nodiscard]] SpectralField commutator(const SpectralField& f, const SpectralField& g,
                                       const SpectralField& h);

}  // namespace anderson_lab::paracontrolled
