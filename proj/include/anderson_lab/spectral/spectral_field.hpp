#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "anderson_lab/spectral/torus_grid.hpp"

namespace anderson_lab::spectral {

using Complex = std::complex<double>;

/// What a field represents. Only used for serialization and bookkeeping.
enum class FieldRole : std::uint8_t {
  generic = 0,
  white_noise = 1,
  mollified_noise = 2,
  resonant_square = 3,
  gff = 4,
  agff = 5,
  coupling_shift = 6,
  wick_power = 7,
  remainder = 8,
  wave_state = 9,
};

struct GridMismatch : std::invalid_argument {
  GridMismatch() : std::invalid_argument("spectral fields live on different grids") {}
};

/// A field on the discrete torus held as Fourier coefficients
/// f(x) = sum_k coeff(k) exp(2 pi i k.x). Real fields keep the Hermitian
/// pairing coeff(-k) = conj(coeff(k)).
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid, bool real = true, FieldRole role = FieldRole::generic)
      : grid_(grid), coeffs_(grid.size()), real_(real), role_(role) {}

  SpectralField(TorusGrid grid, std::vector<Complex> coeffs, bool real = true,
                FieldRole role = FieldRole::generic);

  /// Constant field with the given value.
  static SpectralField constant(TorusGrid grid, double value);

  /// Forward transform of real point values (row-major, x = j/n).
  static SpectralField from_values(TorusGrid grid, std::span<const double> values,
                                   FieldRole role = FieldRole::generic);

  [[nodiscard]] const TorusGrid& grid() const { return grid_; }
  [[nodiscard]] bool is_real() const { return real_; }
  [[nodiscard]] FieldRole role() const { return role_; }
  void set_role(FieldRole role) { role_ = role; }

  [[nodiscard]] Complex coeff(Wavevector k) const { return coeffs_[grid_.index(k)]; }
  Complex& coeff(Wavevector k) { return coeffs_[grid_.index(k)]; }

  /// Sets coeff(k) and, for real fields, coeff(-k) = conj(value).
  void set_mode(Wavevector k, Complex value);

  [[nodiscard]] std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  /// Point values on the grid (real part for real fields).
  [[nodiscard]] std::vector<double> values() const;
  [[nodiscard]] std::vector<Complex> complex_values() const;

  /// Multiplies coefficient k by symbol(k).
  [[nodiscard]] SpectralField multiplied(const std::function<double(Wavevector)>& symbol) const;
  void multiply_in_place(const std::function<double(Wavevector)>& symbol);

  /// Coefficient l2 norm, equal to the L2 norm over the unit-area torus.
  [[nodiscard]] double l2_norm() const;
  /// Maximum of |f| over grid points.
  [[nodiscard]] double max_norm() const;
  /// Largest coefficient deviation |coeff(-k) - conj(coeff(k))|.
  [[nodiscard]] double hermitian_defect() const;

  void enforce_hermitian();
  void zero_nyquist();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);
  /// Adds scale * other.
  SpectralField& axpy(double scale, const SpectralField& other);

 private:
  void check_same_grid(const SpectralField& other) const;

  TorusGrid grid_;
  std::vector<Complex> coeffs_;
  bool real_;
  FieldRole role_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Max-norm distance between coefficient arrays.
[[nodiscard]] double max_coeff_distance(const SpectralField& a, const SpectralField& b);

/// (1 - Delta)^{power}: multiplies by (1 + |k|^2)^{power}.
[[nodiscard]] SpectralField bessel_potential(const SpectralField& f, double power);

/// Direct Sobolev lattice norm (sum_k (1 + |k|^2)^s |f(k)|^2)^{1/2}.
[[nodiscard]] double sobolev_norm(const SpectralField& f, double s);

/// Sharp frequency cut Pi_{>N}: keeps modes with |k| > 2^N.
[[nodiscard]] SpectralField high_pass(const SpectralField& f, int cutoff_exponent);

}  // namespace anderson_lab::spectral
