#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anderson_lab/spectral/noise.hpp"
#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::anderson {

using spectral::EnhancedNoise;
using spectral::SpectralField;
using spectral::TorusGrid;
using spectral::Wavevector;

/// Complex Fourier coefficients over a Basis, in basis order.
using CoeffVector = Eigen::VectorXcd;

struct CutoffTooLarge : std::invalid_argument {
  explicit CutoffTooLarge(const std::string& w) : std::invalid_argument(w) {}
};
struct EigensolveFailure : std::runtime_error {
  explicit EigensolveFailure(const std::string& w) : std::runtime_error(w) {}
};
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& w) : std::domain_error(w) {}
};
struct ShiftTooSmall : std::invalid_argument {
  explicit ShiftTooSmall(const std::string& w) : std::invalid_argument(w) {}
};

/// Wavenumbers with |k| <= k_max ordered by (|k|^2, k1, k2), so a smaller
/// disc is a prefix of a larger one. Also carries the real trigonometric
/// basis 1, sqrt2 cos(2 pi k.x), sqrt2 sin(2 pi k.x) (one pair per +-k),
/// ordered by first appearance of +-k, which keeps the prefix property.
class Basis {
 public:
  enum class Kind : std::uint8_t { constant, cosine, sine };
  struct RealMode {
    Wavevector k;  // representative with k1 > 0 or (k1 == 0, k2 > 0)
    Kind kind;
    int plus;   // index of k in modes()
    int minus;  // index of -k in modes()
  };

  explicit Basis(int k_max);

  [[nodiscard]] int k_max() const { return k_max_; }
  [[nodiscard]] int size() const { return static_cast<int>(modes_.size()); }
  [[nodiscard]] const std::vector<Wavevector>& modes() const { return modes_; }
  [[nodiscard]] const std::vector<RealMode>& real_modes() const { return real_; }
  /// Index of k, or -1 when |k| > k_max.
  [[nodiscard]] int index(Wavevector k) const;

  /// Coordinates in the real basis (U^* v).
  [[nodiscard]] CoeffVector to_real(const CoeffVector& v) const;
  /// Inverse of to_real.
  [[nodiscard]] CoeffVector from_real(const CoeffVector& r) const;
  [[nodiscard]] CoeffVector from_real(const Eigen::VectorXd& r) const;

  /// Restriction of a field's coefficients to the basis.
  [[nodiscard]] CoeffVector restrict(const SpectralField& f) const;
  /// Field on grid carrying v; modes outside the grid are an error.
  [[nodiscard]] SpectralField to_field(const TorusGrid& grid, const CoeffVector& v, bool real = true) const;

 private:
  int k_max_;
  std::vector<Wavevector> modes_;
  std::vector<RealMode> real_;
  std::vector<int> lookup_;
};

enum class CountertermMode {
  /// c = sum over the basis disc of |rho(k)|^2 / (|k|^2 + 1)
  basis,
  /// c = the enhanced noise's grid constant
  grid,
  /// no counterterm
  none,
};

[[nodiscard]] CountertermMode parse_counterterm_mode(const std::string& s);
[[nodiscard]] std::string to_string(CountertermMode m);

struct OperatorOptions {
  CountertermMode counterterm = CountertermMode::basis;
  /// Multiplies the potential by g and the counterterm by g^2.
  double coupling = 1.0;
};

/// A[k, l] = |k|^2 delta_kl + xi_eps(k - l) + c delta_kl on the basis.
struct OperatorMatrix {
  Basis basis;
  Eigen::MatrixXcd entries;
  double counterterm = 0.0;
  int grid_n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  OperatorOptions options;

  [[nodiscard]] double hermitian_defect() const;
  /// U^* A U in the real basis; real symmetric for real noise.
  [[nodiscard]] Eigen::MatrixXd real_form() const;
};

[[nodiscard]] OperatorMatrix assemble(const EnhancedNoise& noise, int k_max,
                                      const OperatorOptions& options = {});

struct SpectralData {
  Basis basis{0};
  /// Ascending.
  Eigen::VectorXd eigenvalues;
  /// Orthonormal eigenvectors in real-basis coordinates (columns); empty when
  /// only eigenvalues were requested.
  Eigen::MatrixXd eigenvectors;
  double shift_K = 0.0;
  double mass = 1.0;
  double counterterm = 0.0;
  int grid_n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  [[nodiscard]] int size() const { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] bool has_vectors() const { return eigenvectors.size() > 0; }
  /// lambda_n + K + mass, n zero-based.
  [[nodiscard]] double shifted(int n) const { return eigenvalues[n] + shift_K + mass; }
  /// Eigenfunction n (zero-based) as Fourier coefficients over the basis.
  [[nodiscard]] CoeffVector eigenfunction(int n) const;
  [[nodiscard]] SpectralField eigenfunction_field(int n, const TorusGrid& grid) const;
  /// Coordinates <f_n, v> for all n.
  [[nodiscard]] Eigen::VectorXcd coordinates(const CoeffVector& v) const;
  /// sum_n a_n f_n.
  [[nodiscard]] CoeffVector synthesize(const Eigen::VectorXcd& a) const;
};

/// Full symmetric eigensolve. K = max(0, -lambda_1).
[[nodiscard]] SpectralData diagonalize(const OperatorMatrix& a, bool vectors = true);

/// Convenience: white noise on an n-grid, enhanced with a Gaussian
/// mollifier of width eps, assembled and diagonalized.
struct OperatorConfig {
  int grid_n = 0;  // 0 selects the smallest even n >= 6 k_max
  int k_max = 12;
  double eps = 0.2;
  spectral::MollifierKind mollifier = spectral::MollifierKind::gaussian;
  std::uint64_t seed = 0;
  OperatorOptions options;
};

[[nodiscard]] int default_grid(int k_max);
[[nodiscard]] EnhancedNoise operator_noise(const OperatorConfig& cfg);
[[nodiscard]] SpectralData build_operator(const OperatorConfig& cfg, bool vectors = true);

using ScalarFunction = std::function<double(double)>;

/// sum_n g(lambda_n + K + 1) <f_n, v> f_n.
[[nodiscard]] CoeffVector apply_function(const ScalarFunction& g, const SpectralData& s, const CoeffVector& v);

/// (H + K + 1)^{s/2} v for s in (-1, 1).
[[nodiscard]] CoeffVector fractional_power(const SpectralData& s, double power, const CoeffVector& v);

/// (n, lambda_n / n) for n (one-based) in [M/4, M/2].
[[nodiscard]] std::vector<std::pair<int, double>> weyl_profile(const SpectralData& s);

/// Operator-norm distance of (A1 + shift)^{-1} and (A2 + shift)^{-1} on the
/// shared modes.
[[nodiscard]] double resolvent_distance(const SpectralData& a, const SpectralData& b, double shift);

/// Orthogonal projection onto the first n eigenfunctions.
[[nodiscard]] CoeffVector project_low(const SpectralData& s, int n, const CoeffVector& v);

/// Remainder diagnostic: H^2 norm of phi_map(f_n) on the noise's grid,
/// returned as (n, lambda_n + K + 1, norm) for the requested indices.
struct RemainderPoint {
  int n;
  double shifted_eigenvalue;
  double remainder_h2;
};
[[nodiscard]] std::vector<RemainderPoint> remainder_profile(const SpectralData& s, const EnhancedNoise& noise,
                                                            const std::vector<int>& indices);

// Binary container "ALSD" (little-endian): magic, u32 version, u32 grid n,
// i32 k_max, u32 M, u8 has_vectors, u8[3] reserved, f64 K, f64 mass,
// f64 counterterm, f64 eps, u64 seed, i32 pairs basis[M], f64 eigenvalues[M],
// f64 eigenvectors[M*M] column-major in real-basis coordinates (if present).
void write_spectral_data(std::ostream& os, const SpectralData& s);
[[nodiscard]] SpectralData read_spectral_data(std::istream& is);
void write_spectral_data_file(const std::filesystem::path& p, const SpectralData& s);
[[nodiscard]] SpectralData read_spectral_data_file(const std::filesystem::path& p);

/// CSV n,lambda (one-based n).
void write_spectrum_csv(std::ostream& os, const SpectralData& s);

}  // namespace anderson_lab::anderson
