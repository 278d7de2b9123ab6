#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/gibbs/measure.hpp"

namespace anderson_lab::wave {

using anderson::SpectralData;
using gibbs::QuarticPotential;
using gibbs::WickReference;
using spectral::Mollifier;
using spectral::SpectralField;

struct BlowupDetected : std::runtime_error {
  BlowupDetected(const std::string& w, double t) : std::runtime_error(w), time(t) {}
  double time;
};

struct NoContraction : std::runtime_error {
  explicit NoContraction(const std::string& w) : std::runtime_error(w) {}
};

/// (u, u_t) in eigen-coordinates of H + K + 1.
struct PhasePoint {
  Eigen::VectorXd u;
  Eigen::VectorXd ut;
  double time = 0.0;
};

[[nodiscard]] PhasePoint zero_phase_point(const SpectralData& s);

/// omega_n = sqrt(lambda_n + K + 1).
[[nodiscard]] Eigen::VectorXd frequencies(const SpectralData& s);

/// Exact linear flow, mode by mode.
[[nodiscard]] PhasePoint linear_propagate(const PhasePoint& p, double t, const SpectralData& s);

/// (AGFF, white noise) initial data: u = agff_coordinates(S, seed) and one
/// N(0,1) velocity per eigenmode.
[[nodiscard]] PhasePoint gaussian_initial(const SpectralData& s, std::uint64_t seed);

class FlowConfig {
 public:
  FlowConfig(const SpectralData& s, int N, const Mollifier& m, double dt, double T,
             WickReference reference = WickReference::agff_profile);

  [[nodiscard]] const SpectralData& spectral() const { return *s_; }
  [[nodiscard]] const QuarticPotential& potential() const { return *pot_; }
  [[nodiscard]] int rank() const { return pot_->rank(); }
  /// Wick variance profile a(x) on the grid.
  [[nodiscard]] const std::vector<double>& counterterm_profile() const { return pot_->profile(); }
  /// Largest dt allowed by the rank: 0.5 / omega_{N-1}.
  [[nodiscard]] double max_dt() const;

  double dt;
  double T;
  bool nonlinear = true;
  /// Flips the sign of the quartic (globalization tests do not apply).
  bool focusing = false;
  int splitting_order = 2;

  /// omega_n and the rotation coefficients of a half step of the
  /// construction-time dt.
  [[nodiscard]] double rotation_dt() const { return rotation_dt_; }
  [[nodiscard]] const Eigen::ArrayXd& omega() const { return omega_; }
  [[nodiscard]] const Eigen::ArrayXd& half_cos() const { return half_cos_; }
  [[nodiscard]] const Eigen::ArrayXd& half_sin() const { return half_sin_; }

 private:
  std::shared_ptr<const SpectralData> s_;
  std::shared_ptr<const QuarticPotential> pot_;
  double rotation_dt_ = 0.0;
  Eigen::ArrayXd omega_, half_cos_, half_sin_;
};

/// -P_{<=N} rho * :psi^3:, zero beyond the rank.
[[nodiscard]] Eigen::VectorXd wick_cubic_force(const PhasePoint& p, const FlowConfig& cfg);

/// 1/2 |u_t|^2 + 1/2 sum omega_n^2 u_n^2 + 1/4 int :psi^4:.
[[nodiscard]] double hamiltonian_energy(const PhasePoint& p, const FlowConfig& cfg);

/// One Strang step of size h (negative h runs backwards).
[[nodiscard]] PhasePoint strang_step(const PhasePoint& p, const FlowConfig& cfg, double h);

/// Points at t = 0, dt, ..., T (round(T/dt) steps). Throws BlowupDetected
/// when |u| exceeds 1e8 or turns non-finite.
[[nodiscard]] std::vector<PhasePoint> galerkin_flow(const PhasePoint& p, const FlowConfig& cfg);
/// Only the final point of galerkin_flow, evolved for time t.
[[nodiscard]] PhasePoint galerkin_evolve(const PhasePoint& p, const FlowConfig& cfg, double t);

/// Field of eigen-coordinates u on the operator's grid.
[[nodiscard]] SpectralField to_field(const SpectralData& s, const Eigen::VectorXd& u);

[[nodiscard]] std::vector<SpectralField> theta_path(const PhasePoint& initial, const SpectralData& s,
                                                    const std::vector<double>& times);

/// Operator Sobolev norm |(H + K + 1)^{s/2} u| in eigen-coordinates.
[[nodiscard]] double operator_norm(const SpectralData& s, const Eigen::VectorXd& u, double s_exp);

struct ThetaNorms {
  double cubic = 0.0;      // |theta^3|^{1/3}
  double quadratic = 0.0;  // |theta^2|^{1/2}
  double linear = 0.0;     // |theta|
};

/// Time L^p norms (Riemann sum over the supplied path) of the Besov
/// C^{-k delta} norms of the Wick powers of psi = rho * P_{<=N} theta.
[[nodiscard]] ThetaNorms theta_norms(const std::vector<PhasePoint>& path, const FlowConfig& cfg, int p,
                                     double delta);

/// R = cubic + quadratic + linear + 1, T = (1 / (10 R^2))^{p/(p-1)} clamped to (0, 1).
[[nodiscard]] double local_time_estimate(const ThetaNorms& norms, int p);
/// Half of local_time_estimate, the horizon used by the solver.
[[nodiscard]] double admissible_time(const ThetaNorms& norms, int p);

struct DpdResult {
  /// v at each point of the theta grid (eigen-coordinates).
  std::vector<Eigen::VectorXd> v;
  std::vector<double> times;
  int iterations = 0;
  double residual = 0.0;
  /// Ratios of successive increments.
  std::vector<double> contraction;
  [[nodiscard]] double contraction_factor() const;
};

/// Picard iteration for v(t) = int_0^t sin((t-s) omega)/omega F(theta + v)(s) ds
/// on the time grid of theta (uniform, starting at 0), trapezoidal in s.
/// Iterates to a relative L^inf_T H^{1-delta} increment below tol.
[[nodiscard]] DpdResult dpd_local_solve(const std::vector<PhasePoint>& theta, const FlowConfig& cfg, double T,
                                        double delta = 0.1, double tol = 1e-9, int max_iterations = 200);

/// CSV t,energy,u_H-delta,u_L2,v_H1-delta. v may be empty.
void write_trajectory_csv(std::ostream& os, const std::vector<PhasePoint>& traj, const FlowConfig& cfg,
                          const std::vector<Eigen::VectorXd>& v, double delta = 0.1);

}  // namespace anderson_lab::wave
