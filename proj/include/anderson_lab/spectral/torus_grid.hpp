#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anderson_lab::spectral {

/// Integer wavevector on the 2-torus.
struct Wavevector {
  int k1 = 0;
  int k2 = 0;

  [[nodiscard]] constexpr int norm2() const { return k1 * k1 + k2 * k2; }
  [[nodiscard]] constexpr Wavevector operator-() const { return {-k1, -k2}; }
  constexpr bool operator==(const Wavevector&) const = default;
};

constexpr Wavevector operator+(Wavevector a, Wavevector b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
constexpr Wavevector operator-(Wavevector a, Wavevector b) { return {a.k1 - b.k1, a.k2 - b.k2}; }

/// Square n x n periodic grid on the unit-area torus. Physical points are
/// x = (j1, j2) / n and wavenumbers take values in {-n/2+1, ..., n/2}.
/// Storage is row-major in (k1 mod n, k2 mod n).
class TorusGrid {
 public:
  explicit TorusGrid(int n_per_dim) : n_(n_per_dim) {
    if (n_ < 4 || n_ % 2 != 0) {
      throw std::invalid_argument("TorusGrid: n_per_dim must be an even integer >= 4");
    }
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  [[nodiscard]] int nyquist() const { return n_ / 2; }

  [[nodiscard]] std::size_t index(Wavevector k) const {
    return static_cast<std::size_t>(wrap(k.k1)) * n_ + wrap(k.k2);
  }

  [[nodiscard]] Wavevector wavevector(std::size_t idx) const {
    return {signed_mode(static_cast<int>(idx / n_)), signed_mode(static_cast<int>(idx % n_))};
  }

  [[nodiscard]] bool is_nyquist(Wavevector k) const {
    return wrap(k.k1) == n_ / 2 || wrap(k.k2) == n_ / 2;
  }

  /// True when k is representable on this grid away from the Nyquist row.
  [[nodiscard]] bool resolves(Wavevector k) const {
    return k.k1 > -n_ / 2 && k.k1 < n_ / 2 && k.k2 > -n_ / 2 && k.k2 < n_ / 2;
  }

  /// Largest |k| among resolved (non-Nyquist) modes.
  [[nodiscard]] double max_resolved_norm() const;

  bool operator==(const TorusGrid&) const = default;

 private:
  [[nodiscard]] int wrap(int k) const { return ((k % n_) + n_) % n_; }
  [[nodiscard]] int signed_mode(int i) const { return i > n_ / 2 ? i - n_ : i; }

  int n_;
};

/// Wavevectors with k1 > 0, or k1 == 0 and k2 > 0: one representative per
/// conjugate pair of resolved modes (excludes k = 0 and Nyquist modes).
[[nodiscard]] std::vector<Wavevector> half_plane_modes(const TorusGrid& grid);

}  // namespace anderson_lab::spectral
