#pragma once

#include <vector>

#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::spectral {

// Dyadic partition built from a smooth radial bump chi with chi = 1 on
// [0, 3/4] and chi = 0 on [4/3, inf); rho(r) = chi(r/2) - chi(r) lives on
// [3/4, 8/3]. Block -1 is chi, block j >= 0 is rho(2^{-j} .). Blocks whose
// indices differ by two or more have disjoint supports.

/// Smooth bump chi(r).
[[nodiscard]] double lp_chi(double r);

/// Symbol of block j at radius r.
[[nodiscard]] double lp_symbol(int j, double r);

/// Symbol of S_j = sum_{i=-1}^{j-1} Delta_i, i.e. chi(2^{-j} r); zero for j <= -1.
[[nodiscard]] double lp_low_symbol(int j, double r);

/// Largest block index carrying resolved modes of the grid.
[[nodiscard]] int max_block(const TorusGrid& grid);

/// Largest block index whose support meets |k| <= radius.
[[nodiscard]] int max_block_for_radius(double radius);

/// Delta_j f. Blocks above max_block(grid) are identically zero.
[[nodiscard]] SpectralField lp_block(const SpectralField& f, int j);

/// S_j f.
[[nodiscard]] SpectralField lp_low(const SpectralField& f, int j);

enum class Exponent { two, infinity };

/// ((2^{js} ||Delta_j f||_{L^p})_j) aggregated in l^q.
[[nodiscard]] double besov_norm(const SpectralField& f, double s, Exponent p, Exponent q);

/// Block L^p norms ||Delta_j f||_{L^p} for j = -1 .. max_block.
[[nodiscard]] std::vector<double> block_norms(const SpectralField& f, Exponent p);

}  // namespace anderson_lab::spectral
