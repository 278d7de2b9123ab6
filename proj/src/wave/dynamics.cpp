#include "anderson_lab/wave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "anderson_lab/gaussian/fields.hpp"
#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::wave {

namespace {

constexpr double kBlowup = 1e8;
constexpr std::uint64_t kVelocityStream = 0x7E10C;

Eigen::ArrayXd profile_array(const QuarticPotential& pot) {
  return Eigen::Map<const Eigen::ArrayXd>(pot.profile().data(), static_cast<Eigen::Index>(pot.profile().size()));
}

void rotate(PhasePoint& p, const Eigen::ArrayXd& w, const Eigen::ArrayXd& c, const Eigen::ArrayXd& sn) {
  const Eigen::ArrayXd u = p.u.array(), ut = p.ut.array();
  p.u = (c * u + sn / w * ut).matrix();
  p.ut = (-w * sn * u + c * ut).matrix();
}

void check_finite(const PhasePoint& p) {
  const double n = p.u.norm();
  if (!std::isfinite(n) || n > kBlowup || !std::isfinite(p.ut.norm())) {
    throw BlowupDetected("galerkin_flow: blow-up at t = " + std::to_string(p.time), p.time);
  }
}

}  // namespace

PhasePoint zero_phase_point(const SpectralData& s) {
  return {Eigen::VectorXd::Zero(s.size()), Eigen::VectorXd::Zero(s.size()), 0.0};
}

Eigen::VectorXd frequencies(const SpectralData& s) {
  Eigen::VectorXd w(s.size());
  for (int n = 0; n < s.size(); ++n) w[n] = std::sqrt(s.shifted(n));
  return w;
}

PhasePoint linear_propagate(const PhasePoint& p, double t, const SpectralData& s) {
  PhasePoint out{Eigen::VectorXd(p.u.size()), Eigen::VectorXd(p.u.size()), p.time + t};
  for (Eigen::Index n = 0; n < p.u.size(); ++n) {
    const double w = std::sqrt(s.shifted(static_cast<int>(n)));
    const double c = std::cos(w * t), sn = std::sin(w * t);
    out.u[n] = c * p.u[n] + sn / w * p.ut[n];
    out.ut[n] = -w * sn * p.u[n] + c * p.ut[n];
  }
  return out;
}

PhasePoint gaussian_initial(const SpectralData& s, std::uint64_t seed) {
  PhasePoint p{gaussian::agff_coordinates(s, seed), Eigen::VectorXd(s.size()), 0.0};
  spectral::GaussianStream rng(seed, kVelocityStream);
  for (int n = 0; n < s.size(); ++n) p.ut[n] = rng.normal();
  return p;
}

FlowConfig::FlowConfig(const SpectralData& s, int N, const Mollifier& m, double dt_, double T_,
                       WickReference reference)
    : dt(dt_), T(T_), s_(std::make_shared<const SpectralData>(s)),
      pot_(std::make_shared<const QuarticPotential>(*s_, m, N, reference)) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("FlowConfig: dt must be positive and T nonnegative");
  if (dt > max_dt() * (1.0 + 1e-12)) {
    throw std::invalid_argument("FlowConfig: dt exceeds 0.5 / omega_N = " + std::to_string(max_dt()));
  }
  rotation_dt_ = dt;
  omega_ = frequencies(*s_).array();
  half_cos_ = (0.5 * dt * omega_).cos();
  half_sin_ = (0.5 * dt * omega_).sin();
}

double FlowConfig::max_dt() const { return 0.5 / std::sqrt(s_->shifted(rank() - 1)); }

Eigen::VectorXd wick_cubic_force(const PhasePoint& p, const FlowConfig& cfg) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(p.u.size());
  if (!cfg.nonlinear) return f;
  f.head(cfg.rank()) = cfg.potential().force(p.u);
  if (cfg.focusing) f = -f;
  return f;
}

double hamiltonian_energy(const PhasePoint& p, const FlowConfig& cfg) {
  const auto& s = cfg.spectral();
  double quad = 0.0;
  for (int n = 0; n < s.size(); ++n) quad += s.shifted(n) * p.u[n] * p.u[n];
  double e = 0.5 * p.ut.squaredNorm() + 0.5 * quad;
  if (cfg.nonlinear) e += (cfg.focusing ? -1.0 : 1.0) * cfg.potential().quartic(p.u);
  return e;
}

PhasePoint strang_step(const PhasePoint& p, const FlowConfig& cfg, double h) {
  if (std::abs(h) != cfg.rotation_dt()) {
    PhasePoint q = linear_propagate(p, 0.5 * h, cfg.spectral());
    if (cfg.nonlinear) q.ut += h * wick_cubic_force(q, cfg);
    return linear_propagate(q, 0.5 * h, cfg.spectral());
  }
  const Eigen::ArrayXd sn = h > 0 ? cfg.half_sin() : Eigen::ArrayXd(-cfg.half_sin());
  PhasePoint q = p;
  rotate(q, cfg.omega(), cfg.half_cos(), sn);
  if (cfg.nonlinear) q.ut += h * wick_cubic_force(q, cfg);
  rotate(q, cfg.omega(), cfg.half_cos(), sn);
  q.time = p.time + h;
  return q;
}

std::vector<PhasePoint> galerkin_flow(const PhasePoint& p, const FlowConfig& cfg) {
  const long steps = std::lround(cfg.T / cfg.dt);
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  out.push_back(p);
  for (long i = 0; i < steps; ++i) {
    PhasePoint next = strang_step(out.back(), cfg, cfg.dt);
    next.time = p.time + static_cast<double>(i + 1) * cfg.dt;
    check_finite(next);
    out.push_back(std::move(next));
  }
  return out;
}

PhasePoint galerkin_evolve(const PhasePoint& p, const FlowConfig& cfg, double t) {
  const long steps = std::lround(std::abs(t) / cfg.dt);
  const double h = t >= 0.0 ? cfg.dt : -cfg.dt;
  PhasePoint cur = p;
  for (long i = 0; i < steps; ++i) {
    cur = strang_step(cur, cfg, h);
    cur.time = p.time + static_cast<double>(i + 1) * h;
    check_finite(cur);
  }
  return cur;
}

SpectralField to_field(const SpectralData& s, const Eigen::VectorXd& u) {
  const Eigen::VectorXd real = s.eigenvectors * u;
  return s.basis.to_field(gaussian::field_grid(s), s.basis.from_real(real));
}

std::vector<SpectralField> theta_path(const PhasePoint& initial, const SpectralData& s,
                                      const std::vector<double>& times) {
  std::vector<SpectralField> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(to_field(s, linear_propagate(initial, t, s).u));
  return out;
}

double operator_norm(const SpectralData& s, const Eigen::VectorXd& u, double s_exp) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < u.size(); ++n) acc += std::pow(s.shifted(static_cast<int>(n)), s_exp) * u[n] * u[n];
  return std::sqrt(acc);
}

ThetaNorms theta_norms(const std::vector<PhasePoint>& path, const FlowConfig& cfg, int p, double delta) {
  if (path.empty()) return {};
  const auto& pot = cfg.potential();
  const Eigen::ArrayXd a = profile_array(pot);
  double acc[3] = {0.0, 0.0, 0.0};
  for (const auto& point : path) {
    const Eigen::ArrayXd psi = pot.smoothed(point.u).array();
    const Eigen::ArrayXd powers[3] = {psi, psi * psi - a, psi * psi * psi - 3.0 * a * psi};
    for (int k = 0; k < 3; ++k) {
      const std::vector<double> v(powers[k].data(), powers[k].data() + powers[k].size());
      const auto f = SpectralField::from_values(pot.grid(), v);
      const double nrm = spectral::besov_norm(f, -(k + 1) * delta, spectral::Exponent::infinity,
                                              spectral::Exponent::infinity);
      acc[k] += std::pow(nrm, p);
    }
  }
  const double w = 1.0 / static_cast<double>(path.size());
  ThetaNorms out;
  out.linear = std::pow(w * acc[0], 1.0 / p);
  out.quadratic = std::pow(std::pow(w * acc[1], 1.0 / p), 0.5);
  out.cubic = std::pow(std::pow(w * acc[2], 1.0 / p), 1.0 / 3.0);
  return out;
}

double local_time_estimate(const ThetaNorms& norms, int p) {
  if (p < 2) throw std::invalid_argument("local_time_estimate: p must be at least 2");
  if (norms.cubic < 0 || norms.quadratic < 0 || norms.linear < 0) {
    throw std::invalid_argument("local_time_estimate: norms must be nonnegative");
  }
  const double R = norms.cubic + norms.quadratic + norms.linear + 1.0;
  const double T = std::pow(1.0 / (10.0 * R * R), static_cast<double>(p) / (p - 1));
  return std::clamp(T, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double admissible_time(const ThetaNorms& norms, int p) { return 0.5 * local_time_estimate(norms, p); }

double DpdResult::contraction_factor() const {
  if (contraction.empty()) return 0.0;
  return *std::max_element(contraction.begin(), contraction.end());
}

DpdResult dpd_local_solve(const std::vector<PhasePoint>& theta, const FlowConfig& cfg, double T, double delta,
                          double tol, int max_iterations) {
  if (theta.size() < 2) throw std::invalid_argument("dpd_local_solve: need at least two theta points");
  const double h = theta[1].time - theta[0].time;
  const long steps = std::min<long>(std::lround(T / h), static_cast<long>(theta.size()) - 1);
  const auto& s = cfg.spectral();
  const auto& pot = cfg.potential();
  const int N = cfg.rank();
  const int M = s.size();
  const Eigen::ArrayXd a = profile_array(pot);
  const Eigen::VectorXd w = frequencies(s).head(N);
  const Eigen::MatrixXd& modes = pot.mode_values();
  const double points = static_cast<double>(modes.rows());
  const double sign = cfg.focusing ? -1.0 : 1.0;

  // Wick powers of psi_theta at each time.
  std::vector<Eigen::ArrayXd> th1, th2, th3;
  for (long i = 0; i <= steps; ++i) {
    const Eigen::ArrayXd p = pot.smoothed(theta[static_cast<std::size_t>(i)].u).array();
    th1.push_back(p);
    th2.push_back(p * p - a);
    th3.push_back(p * p * p - 3.0 * a * p);
  }

  DpdResult out;
  for (long i = 0; i <= steps; ++i) out.times.push_back(theta[static_cast<std::size_t>(i)].time - theta[0].time);
  std::vector<Eigen::VectorXd> v(static_cast<std::size_t>(steps + 1), Eigen::VectorXd::Zero(N));
  double prev_increment = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<Eigen::VectorXd> F(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const Eigen::ArrayXd pv = (modes * v[j]).array();
      const Eigen::VectorXd g = (th3[j] + 3.0 * pv * th2[j] + 3.0 * pv * pv * th1[j] + pv * pv * pv).matrix();
      F[j] = -sign * (modes.transpose() * g) / points;
    }
    std::vector<Eigen::VectorXd> next(v.size(), Eigen::VectorXd::Zero(N));
    for (long i = 1; i <= steps; ++i) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
      for (long j = 0; j <= i; ++j) {
        const double weight = (j == 0 || j == i) ? 0.5 * h : h;
        const double tau = static_cast<double>(i - j) * h;
        acc.array() += weight * ((w.array() * tau).sin() / w.array()) * F[static_cast<std::size_t>(j)].array();
      }
      next[static_cast<std::size_t>(i)] = acc;
    }
    double increment = 0.0, size = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(M), x = Eigen::VectorXd::Zero(M);
      d.head(N) = next[j] - v[j];
      x.head(N) = next[j];
      increment = std::max(increment, operator_norm(s, d, 1.0 - delta));
      size = std::max(size, operator_norm(s, x, 1.0 - delta));
    }
    v = std::move(next);
    out.iterations = it;
    if (it > 1 && prev_increment > 0.0) {
      const double ratio = increment / prev_increment;
      out.contraction.push_back(ratio);
      if (ratio >= 1.0 && increment > tol * size) {
        throw NoContraction("dpd_local_solve: increment ratio " + std::to_string(ratio) + " at iteration " +
                            std::to_string(it));
      }
    }
    out.residual = size > 0.0 ? increment / size : increment;
    if (increment <= tol * size || increment == 0.0) break;
    if (it == max_iterations) throw NoContraction("dpd_local_solve: no convergence");
    prev_increment = increment;
  }
  out.v.reserve(v.size());
  for (const auto& x : v) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(M);
    full.head(N) = x;
    out.v.push_back(std::move(full));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<PhasePoint>& traj, const FlowConfig& cfg,
                          const std::vector<Eigen::VectorXd>& v, double delta) {
  os << "t,energy,u_H-delta,u_L2,v_H1-delta\n";
  os.precision(17);
  const auto& s = cfg.spectral();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << traj[i].time << ',' << hamiltonian_energy(traj[i], cfg) << ',' << operator_norm(s, traj[i].u, -delta)
       << ',' << traj[i].u.norm() << ',';
    if (i < v.size()) os << operator_norm(s, v[i], 1.0 - delta);
    os << '\n';
  }
}

}  // namespace anderson_lab::wave
