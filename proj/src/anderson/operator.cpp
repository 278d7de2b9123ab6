#include "anderson_lab/anderson/operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "anderson_lab/linalg/eigensolve.hpp"
#include "anderson_lab/paracontrolled/paracontrolled.hpp"
#include "anderson_lab/spectral/field_io.hpp"

namespace anderson_lab::anderson {

using spectral::Complex;
namespace le = spectral::le;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

bool is_representative(Wavevector k) { return k.k1 > 0 || (k.k1 == 0 && k.k2 > 0); }

// Nonzero entries of column p of U (real basis in complex coordinates).
struct Column {
  int count;
  int idx[2];
  Complex val[2];
};

Column column(const Basis::RealMode& m) {
  switch (m.kind) {
    case Basis::Kind::constant:
      return {1, {m.plus, 0}, {1.0, 0.0}};
    case Basis::Kind::cosine:
      return {2, {m.plus, m.minus}, {kInvSqrt2, kInvSqrt2}};
    case Basis::Kind::sine:
      break;
  }
  return {2, {m.plus, m.minus}, {Complex(0, -kInvSqrt2), Complex(0, kInvSqrt2)}};
}

Eigen::MatrixXd symmetric_inverse_block(const SpectralData& s, double shift, int m) {
  const Eigen::MatrixXd v = s.eigenvectors.topRows(m);
  Eigen::VectorXd d(s.size());
  for (int n = 0; n < s.size(); ++n) d[n] = 1.0 / (s.eigenvalues[n] + shift);
  return v * d.asDiagonal() * v.transpose();
}

}  // namespace

Basis::Basis(int k_max) : k_max_(k_max) {
  if (k_max < 0) throw std::invalid_argument("Basis: k_max must be nonnegative");
  for (int k1 = -k_max; k1 <= k_max; ++k1) {
    for (int k2 = -k_max; k2 <= k_max; ++k2) {
      if (k1 * k1 + k2 * k2 <= k_max * k_max) modes_.push_back({k1, k2});
    }
  }
  std::stable_sort(modes_.begin(), modes_.end(), [](Wavevector a, Wavevector b) {
    if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
    if (a.k1 != b.k1) return a.k1 < b.k1;
    return a.k2 < b.k2;
  });
  const int w = 2 * k_max + 1;
  lookup_.assign(static_cast<std::size_t>(w) * w, -1);
  for (int i = 0; i < size(); ++i) {
    lookup_[static_cast<std::size_t>(modes_[i].k1 + k_max) * w + (modes_[i].k2 + k_max)] = i;
  }
  for (int i = 0; i < size(); ++i) {
    const Wavevector k = modes_[i];
    if (k.k1 == 0 && k.k2 == 0) {
      real_.push_back({k, Kind::constant, i, i});
      continue;
    }
    const Wavevector rep = is_representative(k) ? k : Wavevector{-k.k1, -k.k2};
    const int plus = index(rep);
    const int minus = index({-rep.k1, -rep.k2});
    if (std::min(plus, minus) != i) continue;
    real_.push_back({rep, Kind::cosine, plus, minus});
    real_.push_back({rep, Kind::sine, plus, minus});
  }
}

int Basis::index(Wavevector k) const {
  if (std::abs(k.k1) > k_max_ || std::abs(k.k2) > k_max_) return -1;
  const int w = 2 * k_max_ + 1;
  return lookup_[static_cast<std::size_t>(k.k1 + k_max_) * w + (k.k2 + k_max_)];
}

CoeffVector Basis::to_real(const CoeffVector& v) const {
  CoeffVector r(size());
  for (int p = 0; p < size(); ++p) {
    const Column c = column(real_[p]);
    Complex acc = 0.0;
    for (int t = 0; t < c.count; ++t) acc += std::conj(c.val[t]) * v[c.idx[t]];
    r[p] = acc;
  }
  return r;
}

CoeffVector Basis::from_real(const CoeffVector& r) const {
  CoeffVector v = CoeffVector::Zero(size());
  for (int p = 0; p < size(); ++p) {
    const Column c = column(real_[p]);
    for (int t = 0; t < c.count; ++t) v[c.idx[t]] += c.val[t] * r[p];
  }
  return v;
}

CoeffVector Basis::from_real(const Eigen::VectorXd& r) const {
  return from_real(CoeffVector(r.cast<Complex>()));
}

CoeffVector Basis::restrict(const SpectralField& f) const {
  CoeffVector v(size());
  for (int i = 0; i < size(); ++i) {
    v[i] = f.grid().resolves(modes_[i]) ? f.coeff(modes_[i]) : Complex(0.0);
  }
  return v;
}

SpectralField Basis::to_field(const TorusGrid& grid, const CoeffVector& v, bool real) const {
  if (grid.nyquist() <= k_max_) throw std::invalid_argument("Basis::to_field: grid too coarse for basis");
  SpectralField f(grid, real);
  for (int i = 0; i < size(); ++i) f.coeff(modes_[i]) = v[i];
  return f;
}

CountertermMode parse_counterterm_mode(const std::string& s) {
  if (s == "basis") return CountertermMode::basis;
  if (s == "grid") return CountertermMode::grid;
  if (s == "none") return CountertermMode::none;
  throw std::invalid_argument("unknown counterterm mode: " + s);
}

std::string to_string(CountertermMode m) {
  switch (m) {
    case CountertermMode::basis:
      return "basis";
    case CountertermMode::grid:
      return "grid";
    case CountertermMode::none:
      return "none";
  }
  return "?";
}

double OperatorMatrix::hermitian_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd OperatorMatrix::real_form() const {
  const int m = basis.size();
  const auto& real = basis.real_modes();
  Eigen::MatrixXcd au(m, m);
  for (int q = 0; q < m; ++q) {
    const Column c = column(real[q]);
    au.col(q) = c.val[0] * entries.col(c.idx[0]);
    if (c.count == 2) au.col(q) += c.val[1] * entries.col(c.idx[1]);
  }
  Eigen::MatrixXd out(m, m);
  for (int p = 0; p < m; ++p) {
    const Column c = column(real[p]);
    for (int q = 0; q < m; ++q) {
      Complex acc = std::conj(c.val[0]) * au(c.idx[0], q);
      if (c.count == 2) acc += std::conj(c.val[1]) * au(c.idx[1], q);
      out(p, q) = acc.real();
    }
  }
  return out;
}

OperatorMatrix assemble(const EnhancedNoise& noise, int k_max, const OperatorOptions& options) {
  const TorusGrid& grid = noise.grid();
  if (6 * k_max > grid.n()) {
    throw CutoffTooLarge("assemble: k_max = " + std::to_string(k_max) + " needs a grid of at least " +
                         std::to_string(6 * k_max) + " points per side, have " + std::to_string(grid.n()));
  }
  OperatorMatrix a{Basis(k_max), {}, 0.0, grid.n(), noise.mollifier.epsilon(), noise.seed, options};
  const double g = options.coupling;
  switch (options.counterterm) {
    case CountertermMode::basis:
      a.counterterm = g * g * spectral::renorm_constant_disc(noise.mollifier, k_max);
      break;
    case CountertermMode::grid:
      a.counterterm = g * g * noise.c_eps;
      break;
    case CountertermMode::none:
      a.counterterm = 0.0;
      break;
  }
  const int m = a.basis.size();
  const auto& modes = a.basis.modes();
  a.entries.resize(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) a.entries(i, j) = g * noise.xi_eps.coeff(modes[i] - modes[j]);
    a.entries(j, j) += double(modes[j].norm2()) + a.counterterm;
  }
  return a;
}

SpectralData diagonalize(const OperatorMatrix& a, bool vectors) {
  SpectralData s;
  s.basis = a.basis;
  s.counterterm = a.counterterm;
  s.grid_n = a.grid_n;
  s.eps = a.eps;
  s.seed = a.seed;
  const int m = a.basis.size();
  Eigen::MatrixXd r = a.real_form();
  s.eigenvalues.resize(m);
  const int info = linalg::symmetric_eigen(m, r.data(), s.eigenvalues.data(), vectors);
  if (info != 0) throw EigensolveFailure("diagonalize: LAPACK dsyevd info = " + std::to_string(info));
  if (vectors) s.eigenvectors = std::move(r);
  s.shift_K = m > 0 ? std::max(0.0, -s.eigenvalues[0]) : 0.0;
  return s;
}

int default_grid(int k_max) { return std::max(4, 6 * k_max); }

EnhancedNoise operator_noise(const OperatorConfig& cfg) {
  const TorusGrid grid(cfg.grid_n > 0 ? cfg.grid_n : default_grid(cfg.k_max));
  return spectral::build_enhanced(spectral::sample_white_noise(grid, cfg.seed), spectral::Mollifier(cfg.eps, cfg.mollifier),
                                  cfg.seed);
}

SpectralData build_operator(const OperatorConfig& cfg, bool vectors) {
  return diagonalize(assemble(operator_noise(cfg), cfg.k_max, cfg.options), vectors);
}

CoeffVector SpectralData::eigenfunction(int n) const {
  return basis.from_real(Eigen::VectorXd(eigenvectors.col(n)));
}

SpectralField SpectralData::eigenfunction_field(int n, const TorusGrid& grid) const {
  return basis.to_field(grid, eigenfunction(n));
}

Eigen::VectorXcd SpectralData::coordinates(const CoeffVector& v) const {
  if (!has_vectors()) throw std::logic_error("spectral data holds no eigenvectors");
  return eigenvectors.transpose() * basis.to_real(v);
}

CoeffVector SpectralData::synthesize(const Eigen::VectorXcd& a) const {
  if (!has_vectors()) throw std::logic_error("spectral data holds no eigenvectors");
  return basis.from_real(CoeffVector(eigenvectors * a));
}

CoeffVector apply_function(const ScalarFunction& g, const SpectralData& s, const CoeffVector& v) {
  Eigen::VectorXcd a = s.coordinates(v);
  for (int n = 0; n < s.size(); ++n) {
    const double x = s.shifted(n);
    const double y = g(x);
    if (!std::isfinite(y)) {
      throw DomainError("apply_function: function undefined at eigenvalue " + std::to_string(x));
    }
    a[n] *= y;
  }
  return s.synthesize(a);
}

CoeffVector fractional_power(const SpectralData& s, double power, const CoeffVector& v) {
  if (power == 0.0) return v;
  return apply_function([power](double x) { return x > 0.0 ? std::pow(x, 0.5 * power) : NAN; }, s, v);
}

std::vector<std::pair<int, double>> weyl_profile(const SpectralData& s) {
  std::vector<std::pair<int, double>> out;
  const int m = s.size();
  for (int n = (m + 3) / 4; n <= m / 2; ++n) {
    if (n >= 1) out.emplace_back(n, s.eigenvalues[n - 1] / n);
  }
  return out;
}

double resolvent_distance(const SpectralData& a, const SpectralData& b, double shift) {
  if (shift <= -a.eigenvalues[0] || shift <= -b.eigenvalues[0]) {
    throw ShiftTooSmall("resolvent_distance: shift " + std::to_string(shift) + " does not exceed -lambda_1");
  }
  const int m = std::min(a.size(), b.size());
  Eigen::MatrixXd d = symmetric_inverse_block(a, shift, m) - symmetric_inverse_block(b, shift, m);
  Eigen::VectorXd w(m);
  const int info = linalg::symmetric_eigen(m, d.data(), w.data(), false);
  if (info != 0) throw EigensolveFailure("resolvent_distance: LAPACK dsyevd info = " + std::to_string(info));
  return m == 0 ? 0.0 : std::max(std::abs(w[0]), std::abs(w[m - 1]));
}

CoeffVector project_low(const SpectralData& s, int n, const CoeffVector& v) {
  if (n < 0 || n > s.size()) throw std::invalid_argument("project_low: N out of range");
  Eigen::VectorXcd a = s.coordinates(v);
  a.tail(s.size() - n).setZero();
  return s.synthesize(a);
}

std::vector<RemainderPoint> remainder_profile(const SpectralData& s, const EnhancedNoise& noise,
                                              const std::vector<int>& indices) {
  std::vector<RemainderPoint> out;
  for (int n : indices) {
    const SpectralField f = s.eigenfunction_field(n, noise.grid());
    const SpectralField sharp = paracontrolled::phi_map(f, noise, paracontrolled::kNoCutoff);
    out.push_back({n + 1, s.shifted(n), spectral::sobolev_norm(sharp, 2.0)});
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'A', 'L', 'S', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_spectral_data(std::ostream& os, const SpectralData& s) {
  os.write(kMagic, 4);
  le::put_u32(os, kVersion);
  le::put_u32(os, static_cast<std::uint32_t>(s.grid_n));
  le::put_i32(os, s.basis.k_max());
  le::put_u32(os, static_cast<std::uint32_t>(s.size()));
  le::put_u8(os, s.has_vectors() ? 1 : 0);
  for (int i = 0; i < 3; ++i) le::put_u8(os, 0);
  le::put_f64(os, s.shift_K);
  le::put_f64(os, s.mass);
  le::put_f64(os, s.counterterm);
  le::put_f64(os, s.eps);
  le::put_u64(os, s.seed);
  for (const auto& k : s.basis.modes()) {
    le::put_i32(os, k.k1);
    le::put_i32(os, k.k2);
  }
  for (int n = 0; n < s.size(); ++n) le::put_f64(os, s.eigenvalues[n]);
  if (s.has_vectors()) {
    for (Eigen::Index i = 0; i < s.eigenvectors.size(); ++i) le::put_f64(os, s.eigenvectors.data()[i]);
  }
}

SpectralData read_spectral_data(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw std::runtime_error("spectral container: bad magic");
  }
  if (le::get_u32(is) != kVersion) throw std::runtime_error("spectral container: unsupported version");
  SpectralData s;
  s.grid_n = static_cast<int>(le::get_u32(is));
  s.basis = Basis(le::get_i32(is));
  const int m = static_cast<int>(le::get_u32(is));
  if (m != s.basis.size()) throw std::runtime_error("spectral container: basis size mismatch");
  const bool vectors = le::get_u8(is) != 0;
  for (int i = 0; i < 3; ++i) (void)le::get_u8(is);
  s.shift_K = le::get_f64(is);
  s.mass = le::get_f64(is);
  s.counterterm = le::get_f64(is);
  s.eps = le::get_f64(is);
  s.seed = le::get_u64(is);
  for (int i = 0; i < m; ++i) {
    const Wavevector k{le::get_i32(is), le::get_i32(is)};
    if (!(k.k1 == s.basis.modes()[i].k1 && k.k2 == s.basis.modes()[i].k2)) {
      throw std::runtime_error("spectral container: basis order mismatch");
    }
  }
  s.eigenvalues.resize(m);
  for (int n = 0; n < m; ++n) s.eigenvalues[n] = le::get_f64(is);
  if (vectors) {
    s.eigenvectors.resize(m, m);
    for (Eigen::Index i = 0; i < s.eigenvectors.size(); ++i) s.eigenvectors.data()[i] = le::get_f64(is);
  }
  return s;
}

void write_spectral_data_file(const std::filesystem::path& p, const SpectralData& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + p.string());
  write_spectral_data(os, s);
}

SpectralData read_spectral_data_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + p.string());
  return read_spectral_data(is);
}

void write_spectrum_csv(std::ostream& os, const SpectralData& s) {
  os << "n,lambda\n" << std::setprecision(17);
  for (int n = 0; n < s.size(); ++n) os << n + 1 << ',' << s.eigenvalues[n] << '\n';
}

}  // namespace anderson_lab::anderson
