#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::spectral {

enum class MollifierKind { gaussian, sharp_cutoff };

/// Fourier multiplier k -> rho_eps(k) in [0, 1] with rho_eps(0) = 1.
/// gaussian: exp(-eps^2 |k|^2 / 2). sharp_cutoff: 1 for |k| <= 1/eps.
/// eps = 0 gives the identity multiplier; eps = +inf keeps only k = 0.
class Mollifier {
 public:
  Mollifier() = default;
  explicit Mollifier(double epsilon, MollifierKind kind = MollifierKind::gaussian)
      : epsilon_(epsilon), kind_(kind) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("Mollifier: epsilon must be >= 0");
  }

  static Mollifier identity() { return Mollifier(0.0); }

  [[nodiscard]] double epsilon() const { return epsilon_; }
  [[nodiscard]] MollifierKind kind() const { return kind_; }

  [[nodiscard]] double operator()(Wavevector k) const { return symbol(k.norm2()); }

  /// Multiplier as a function of |k|^2.
  [[nodiscard]] double symbol(double k2) const {
    if (k2 == 0.0 || epsilon_ == 0.0) return 1.0;
    if (std::isinf(epsilon_)) return 0.0;
    if (kind_ == MollifierKind::gaussian) return std::exp(-0.5 * epsilon_ * epsilon_ * k2);
    return k2 * epsilon_ * epsilon_ <= 1.0 ? 1.0 : 0.0;
  }

  /// Mollifier with the same kind and the product multiplier rho^2, when
  /// representable (gaussian: eps * sqrt(2)).
  [[nodiscard]] Mollifier squared() const;

  [[nodiscard]] std::string describe() const;

 private:
  double epsilon_ = 0.0;
  MollifierKind kind_ = MollifierKind::gaussian;
};

/// rho_eps * f.
[[nodiscard]] SpectralField mollify(const SpectralField& f, const Mollifier& m);

[[nodiscard]] MollifierKind parse_mollifier_kind(const std::string& name);
[[nodiscard]] std::string to_string(MollifierKind kind);

}  // namespace anderson_lab::spectral
