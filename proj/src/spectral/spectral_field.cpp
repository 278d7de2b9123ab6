#include "anderson_lab/spectral/spectral_field.hpp"

#include <algorithm>
#include <cmath>

#include "anderson_lab/spectral/fft.hpp"

namespace anderson_lab::spectral {

double TorusGrid::max_resolved_norm() const {
  const int m = n_ / 2 - 1;
  return std::sqrt(2.0 * m * m);
}

std::vector<Wavevector> half_plane_modes(const TorusGrid& grid) {
  std::vector<Wavevector> out;
  const int m = grid.nyquist() - 1;
  for (int k1 = 0; k1 <= m; ++k1) {
    for (int k2 = -m; k2 <= m; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      out.push_back({k1, k2});
    }
  }
  return out;
}

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs, bool real, FieldRole role)
    : grid_(grid), coeffs_(std::move(coeffs)), real_(real), role_(role) {
  if (coeffs_.size() != grid_.size()) throw GridMismatch();
}

SpectralField SpectralField::constant(TorusGrid grid, double value) {
  SpectralField f(grid);
  f.coeff({0, 0}) = value;
  return f;
}

SpectralField SpectralField::from_values(TorusGrid grid, std::span<const double> values,
                                         FieldRole role) {
  if (values.size() != grid.size()) throw GridMismatch();
  std::vector<Complex> data(values.begin(), values.end());
  fft::analyze(grid.n(), data);
  SpectralField f(grid, std::move(data), true, role);
  f.enforce_hermitian();
  return f;
}

void SpectralField::set_mode(Wavevector k, Complex value) {
  coeffs_[grid_.index(k)] = value;
  if (real_) coeffs_[grid_.index(-k)] = std::conj(value);
}

std::vector<Complex> SpectralField::complex_values() const {
  std::vector<Complex> data = coeffs_;
  fft::synthesize(grid_.n(), data);
  return data;
}

std::vector<double> SpectralField::values() const {
  const auto data = complex_values();
  std::vector<double> out(data.size());
  std::transform(data.begin(), data.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

SpectralField SpectralField::multiplied(const std::function<double(Wavevector)>& symbol) const {
  SpectralField out = *this;
  out.multiply_in_place(symbol);
  return out;
}

void SpectralField::multiply_in_place(const std::function<double(Wavevector)>& symbol) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    coeffs_[i] *= symbol(grid_.wavevector(i));
  }
}

double SpectralField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

double SpectralField::max_norm() const {
  double m = 0.0;
  for (const auto& v : complex_values()) m = std::max(m, std::abs(v));
  return m;
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const auto k = grid_.wavevector(i);
    d = std::max(d, std::abs(coeffs_[grid_.index(-k)] - std::conj(coeffs_[i])));
  }
  return d;
}

void SpectralField::enforce_hermitian() {
  if (!real_) return;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::size_t j = grid_.index(-grid_.wavevector(i));
    if (j < i) continue;
    const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
}

void SpectralField::zero_nyquist() {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (grid_.is_nyquist(grid_.wavevector(i))) coeffs_[i] = 0.0;
  }
}

void SpectralField::check_same_grid(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw GridMismatch();
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  return axpy(1.0, other);
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  return axpy(-1.0, other);
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

SpectralField& SpectralField::axpy(double scale, const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += scale * other.coeffs_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double max_coeff_distance(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
  double d = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    d = std::max(d, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  return d;
}

SpectralField bessel_potential(const SpectralField& f, double power) {
  return f.multiplied([power](Wavevector k) { return std::pow(1.0 + k.norm2(), power); });
}

double sobolev_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  const auto& grid = f.grid();
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    acc += std::pow(1.0 + grid.wavevector(i).norm2(), s) * std::norm(f.coeffs()[i]);
  }
  return std::sqrt(acc);
}

SpectralField high_pass(const SpectralField& f, int cutoff_exponent) {
  const double cut = std::ldexp(1.0, cutoff_exponent);
  return f.multiplied([cut](Wavevector k) { return std::sqrt(double(k.norm2())) > cut ? 1.0 : 0.0; });
}

}  // namespace anderson_lab::spectral
