#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/cli/cli.hpp"
#include "anderson_lab/experiments/experiments.hpp"
#include "anderson_lab/gaussian/fields.hpp"
#include "anderson_lab/gibbs/measure.hpp"
#include "anderson_lab/paracontrolled/paracontrolled.hpp"
#include "anderson_lab/paracontrolled/paraproducts.hpp"
#include "anderson_lab/spectral/noise.hpp"
#include "anderson_lab/spectral/products.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/util/parallel.hpp"
#include "anderson_lab/util/stats.hpp"
#include "anderson_lab/wave/dynamics.hpp"
#include "test_support.hpp"

using namespace anderson_lab;
using spectral::Mollifier;
using spectral::SpectralField;
using spectral::stream_key;
using spectral::TorusGrid;
using util::MomentAccumulator;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string num(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + num(x);
  return "[" + s + "]";
}

anderson::SpectralData op(int k_max, double eps, std::uint64_t seed,
                          anderson::CountertermMode mode = anderson::CountertermMode::basis, bool vectors = true) {
  anderson::OperatorConfig c;
  c.k_max = k_max;
  c.eps = eps;
  c.seed = seed;
  c.options.counterterm = mode;
  return anderson::build_operator(c, vectors);
}

bool agree(const MomentAccumulator& a, const MomentAccumulator& b) {
  return std::abs(a.mean() - b.mean()) < 3.0 * std::hypot(a.std_error(), b.std_error());
}

double phase_distance(const wave::PhasePoint& a, const wave::PhasePoint& b) {
  return std::sqrt((a.u - b.u).squaredNorm() + (a.ut - b.ut).squaredNorm());
}

Outcome exact_decomposition() {
  const TorusGrid g(64);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = alab_test::random_field(g, 1000 + 2 * s, 0.3);
    const auto h = alab_test::random_field(g, 1001 + 2 * s, 0.3);
    const auto split = paracontrolled::split_product(f, h);
    worst = std::max(worst, (split.less + split.res + split.greater - spectral::product(f, h)).max_norm());
  }
  return {worst < 1e-11, "max-norm residual " + num(worst) + " over 100 pairs on 64^2"};
}

Outcome paracontrolled_identity() {
  const TorusGrid g(64);
  const auto noise = spectral::build_enhanced(spectral::sample_white_noise(g, 21), Mollifier(0.2), 21);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto u = alab_test::random_field(g, 300 + s, 1.5);
    const auto pc = paracontrolled::make_paracontrolled(u, noise, paracontrolled::kNoCutoff);
    const auto a = paracontrolled::apply_paracontrolled_hamiltonian(pc, noise);
    const auto b = paracontrolled::direct_hamiltonian(u, noise);
    worst = std::max(worst, (a - b).l2_norm() / b.l2_norm());
  }
  return {worst < 1e-8, "max relative L2 gap " + num(worst) + " over 20 functions, eps 0.2"};
}

Outcome resolvent_cauchy() {
  const std::vector<double> ladder{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<anderson::SpectralData> ops;
  std::vector<double> bare;
  for (double e : ladder) {
    ops.push_back(op(16, e, 0));
    bare.push_back(op(16, e, 0, anderson::CountertermMode::none, false).eigenvalues[0]);
  }
  double shift = 1.0;
  for (const auto& s : ops) shift = std::max(shift, 1.0 - s.eigenvalues[0]);
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) d.push_back(anderson::resolvent_distance(ops[i], ops[i + 1], shift));
  bool monotone = true;
  for (std::size_t i = 1; i < d.size(); ++i) monotone = monotone && d[i] < d[i - 1];
  bool diverges = true;
  std::vector<double> drops;
  for (std::size_t i = 0; i + 2 < bare.size(); ++i) {
    drops.push_back(bare[i] - bare[i + 1]);
    diverges = diverges && drops.back() > 0.5;
  }
  return {monotone && diverges, "d(eps, eps/2) " + list(d) + (monotone ? " monotone" : " not monotone") +
                                    "; bare lambda_1 drops " + list(drops)};
}

Outcome weyl_law() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = op(24, 0.2, seed, anderson::CountertermMode::basis, false);
    double lo = INFINITY, hi = 0.0;
    for (const auto& [n, r] : anderson::weyl_profile(s)) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    worst = std::max(worst, hi / lo);
  }
  return {worst < 1.5, "worst max/min of lambda_n/n over 5 seeds " + num(worst)};
}

Outcome functional_calculus() {
  const auto s = op(12, 0.2, 0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  Eigen::VectorXd r(s.size());
  for (auto& x : r) x = n01(rng);
  const auto v = s.basis.from_real(r);
  const double t = 0.37;
  const auto pyth = anderson::apply_function(
      [t](double x) { return std::pow(std::cos(t * std::sqrt(x)), 2) + std::pow(std::sin(t * std::sqrt(x)), 2); }, s, v);
  const double id_err = (pyth - v).norm() / v.norm();

  const auto p = wave::gaussian_initial(s, 3);
  const auto two = wave::linear_propagate(wave::linear_propagate(p, 0.3, s), 0.45, s);
  const auto one = wave::linear_propagate(p, 0.75, s);
  const double group_err = phase_distance(two, one);
  return {id_err < 1e-10 && group_err < 1e-12,
          "cos^2+sin^2 relative error " + num(id_err) + ", group law error " + num(group_err)};
}

Outcome wick_moments() {
  const TorusGrid g(32);
  const double K = 1.0;
  const Mollifier m(0.1);
  double oracle = 0.0;
  const int top = g.nyquist() - 1;
  for (int a = -top; a <= top; ++a) {
    for (int b = -top; b <= top; ++b) {
      oracle += 2.0 * std::pow(m.symbol(a * a + b * b), 4) / std::pow(a * a + b * b + K, 2);
    }
  }
  MomentAccumulator first, second;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto phi = gaussian::sample_gff(g, K, stream_key(31, i));
    const double v = gaussian::wick_power_gff(phi, 2, m, K).value.coeff({0, 0}).real();
    first.add(v);
    second.add(v * v);
  }
  const bool ok1 = std::abs(first.mean()) < 3 * first.std_error();
  const bool ok2 = std::abs(second.mean() - oracle) < 3 * second.std_error();
  return {ok1 && ok2, "E int :phi^2: = " + num(first.mean()) + " +- " + num(first.std_error()) +
                          "; E (int :phi^2:)^2 = " + num(second.mean()) + " +- " + num(second.std_error()) +
                          " vs lattice sum " + num(oracle)};
}

Outcome coupling() {
  const auto s = op(12, 0.2, 0);
  const double mass = s.shift_K + 1.0;
  const auto grid = gaussian::field_grid(s);
  std::vector<MomentAccumulator> acc(10);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto pair = gaussian::coupled_sample(s, stream_key(11, i));
    const auto gff = gaussian::sample_gff(grid, mass, stream_key(12, i));
    const auto agff = gaussian::sample_agff(s, stream_key(13, i));
    int j = 0;
    for (spectral::Wavevector k : {spectral::Wavevector{1, 0}, spectral::Wavevector{3, 2}}) {
      acc[j++].add(pair.phi_G.coeff(k).real());
      acc[j++].add(gff.coeff(k).real());
      acc[j++].add(std::norm(pair.phi_G.coeff(k)));
      acc[j++].add(std::norm(gff.coeff(k)));
    }
    acc[j++].add(pair.phi_A.coeff({1, 0}).real());
    acc[j++].add(agff.coeff({1, 0}).real());
    (void)j;
  }
  MomentAccumulator a2, b2;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    a2.add(std::norm(gaussian::coupled_sample(s, stream_key(14, i)).phi_A.coeff({1, 0})));
    b2.add(std::norm(gaussian::sample_agff(s, stream_key(15, i)).coeff({1, 0})));
  }
  bool marginals = agree(a2, b2);
  for (int j = 0; j < 10; j += 2) marginals = marginals && agree(acc[j], acc[j + 1]);

  std::vector<double> slopes;
  bool negative = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sk = op(24, 0.2, seed);
    const auto pair = gaussian::coupled_sample(sk, stream_key(seed, 0));
    slopes.push_back(gaussian::shift_regularity_profile(pair, 0.9).tail_slope);
    negative = negative && slopes.back() < 0.0;
  }
  return {marginals && negative, std::string("marginals ") + (marginals ? "match" : "differ") +
                                     " (1e4 draws); H^0.9 tail slopes at k_max 24 " + list(slopes)};
}

Outcome pseudo_wick() {
  const auto s = op(12, 0.2, 0);
  const Mollifier m(0.2);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto pair = gaussian::coupled_sample(s, stream_key(51, i));
    for (int M : {2, 3, 4}) {
      const auto pw = gaussian::pseudo_wick_agff(pair, M, m);
      const auto a = pw.direct.value.values();
      const auto b = pw.binomial.value.values();
      for (std::size_t x = 0; x < a.size(); ++x) worst = std::max(worst, std::abs(a[x] - b[x]));
    }
  }
  return {worst < 1e-9, "max pointwise gap " + num(worst) + " over 20 draws, M = 2, 3, 4"};
}

Outcome partition() {
  std::vector<gibbs::PartitionEstimate> z;
  for (double eps : {0.2, 0.1}) {
    const auto s = op(12, eps, 0);
    z.push_back(gibbs::partition_estimate(s, Mollifier(eps), 30, 10000, 0));
  }
  const double rel0 = z[0].std_error / z[0].estimate, rel1 = z[1].std_error / z[1].estimate;
  const bool stable = std::abs(z[0].estimate - z[1].estimate) < 3 * std::hypot(z[0].std_error, z[1].std_error);
  return {rel0 < 0.1 && rel1 < 0.1 && stable,
          "Z(eps 0.2) = " + num(z[0].estimate) + " rel SE " + num(rel0) + "; Z(eps 0.1) = " + num(z[1].estimate) +
              " rel SE " + num(rel1) + (stable ? "; stable" : "; not stable within 3 SE")};
}

Outcome dynamics_quality() {
  const auto s = op(12, 0.2, 0);
  const Mollifier m(0.2);
  const wave::FlowConfig cfg(s, 30, m, 1e-3, 1.0);
  const auto p = wave::gaussian_initial(s, stream_key(0, 0));
  const double e0 = wave::hamiltonian_energy(p, cfg);
  const auto traj = wave::galerkin_flow(p, cfg);
  double drift = 0.0;
  for (const auto& q : traj) drift = std::max(drift, std::abs(wave::hamiltonian_energy(q, cfg) - e0));
  drift /= std::abs(e0);

  const wave::FlowConfig fine(s, 30, m, 5e-4, 1.0);
  const double one_way = phase_distance(traj.back(), wave::galerkin_evolve(p, fine, 1.0));
  auto back = traj.back();
  back.ut = -back.ut;
  auto r = wave::galerkin_evolve(back, cfg, 1.0);
  r.ut = -r.ut;
  const double reversal = phase_distance(r, p);

  const wave::FlowConfig one(s, 1, m, 1e-4, 1.0);
  const Eigen::VectorXd f = one.potential().mode_values().col(0);
  const double w2 = s.shifted(0);
  const Eigen::ArrayXd a = Eigen::Map<const Eigen::ArrayXd>(one.potential().profile().data(),
                                                           static_cast<Eigen::Index>(one.potential().profile().size()));
  const double i4 = f.array().pow(4).mean();
  const double ia = (a * f.array().square()).mean();
  auto accel = [&](double u) { return -w2 * u - (i4 * u * u * u - 3.0 * ia * u); };
  wave::PhasePoint q0 = wave::zero_phase_point(s);
  q0.u[0] = 0.9;
  q0.ut[0] = -0.4;
  double u = q0.u[0], v = q0.ut[0];
  const double h = 1e-5;
  for (int i = 0; i < 100000; ++i) {
    const double k1u = v, k1v = accel(u);
    const double k2u = v + 0.5 * h * k1v, k2v = accel(u + 0.5 * h * k1u);
    const double k3u = v + 0.5 * h * k2v, k3v = accel(u + 0.5 * h * k2u);
    const double k4u = v + h * k3v, k4v = accel(u + h * k3u);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  const auto q = wave::galerkin_evolve(q0, one, 1.0);
  const double oracle_err = std::hypot(q.u[0] - u, q.ut[0] - v);
  return {drift < 1e-6 && reversal < 5 * one_way && oracle_err < 1e-6,
          "relative drift " + num(drift) + "; reversal " + num(reversal) + " vs one-way " + num(one_way) +
              "; N=1 oracle error " + num(oracle_err)};
}

Outcome dpd_consistency() {
  const auto s = op(12, 0.2, 0);
  const Mollifier m(0.2);
  const wave::FlowConfig nl(s, 30, m, 1e-3, 0.1);
  wave::FlowConfig lin(s, 30, m, 1e-3, 0.1);
  lin.nonlinear = false;
  const auto p = wave::gaussian_initial(s, stream_key(0, 0));
  const auto theta = wave::galerkin_flow(p, lin);
  const auto r = wave::dpd_local_solve(theta, nl, 0.1);
  const auto u = wave::galerkin_flow(p, nl);
  double gap = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    gap = std::max(gap, wave::operator_norm(s, u[i].u - theta[i].u - r.v[i], -0.1));
  }

  wave::FlowConfig unit(s, 30, m, 1e-3, 1.0);
  unit.nonlinear = false;
  const auto norms = wave::theta_norms(wave::galerkin_flow(p, unit), unit, 4, 0.1);
  const double T = wave::admissible_time(norms, 4);
  wave::FlowConfig lin_T(s, 30, m, T / 20, T);
  lin_T.nonlinear = false;
  const wave::FlowConfig nl_T(s, 30, m, T / 20, T);
  const auto rT = wave::dpd_local_solve(wave::galerkin_flow(p, lin_T), nl_T, T);
  const double factor = rT.contraction_factor();
  return {gap < 1e-4 && factor < 0.5, "L^inf_T H^-0.1 gap " + num(gap) + " at T 0.1; contraction " + num(factor) +
                                          " at the admissible time " + num(T)};
}

Outcome law_preservation() {
  const auto s = op(12, 0.2, 0);
  MomentAccumulator v0, vt, c0, ct, x0, xt, w0, wt;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto init = wave::gaussian_initial(s, stream_key(21, i));
    const auto f = wave::theta_path(init, s, {0.0, 0.7});
    const auto a0 = f[0].coeff({1, 0}), at = f[1].coeff({1, 0});
    const auto b0 = f[0].coeff({0, 1}), bt = f[1].coeff({0, 1});
    v0.add(std::norm(a0));
    vt.add(std::norm(at));
    c0.add((a0 * std::conj(b0)).real());
    ct.add((at * std::conj(bt)).real());
    const auto moved = wave::linear_propagate(init, 0.7, s);
    x0.add(init.u[2] * init.u[3]);
    xt.add(moved.u[2] * moved.u[3]);
    w0.add(init.u[0] * init.u[0]);
    wt.add(moved.u[0] * moved.u[0]);
  }
  const bool ok = agree(v0, vt) && agree(c0, ct) && agree(x0, xt) && agree(w0, wt);
  return {ok, "E|theta(1,0)|^2 " + num(v0.mean()) + " -> " + num(vt.mean()) + ", cross " + num(c0.mean()) + " -> " +
                  num(ct.mean()) + ", E u_0^2 " + num(w0.mean()) + " -> " + num(wt.mean())};
}

Outcome gibbs_invariance() {
  const auto s = op(12, 0.2, 0);
  const auto r = experiments::invariance_test(s, Mollifier(0.2), 30, 0.5, 2000, 0);
  std::string d;
  for (const auto& o : r.observables) d += o.name + " " + num(o.z_score, 2) + ", ";
  return {r.verdict(), "z: " + d + "blow-ups " + std::to_string(r.blowups)};
}

Outcome convergence() {
  const auto r = experiments::convergence_suite(experiments::ConvergenceConfig{});
  std::string d;
  for (const auto& f : r.fits) {
    const std::string study = f.name.substr(0, f.name.rfind("_rate"));
    d += study + (f.pass ? " monotone" : " not monotone");
    for (const auto& s : r.series) {
      if (s.name == study) d += " " + list(s.y) + " slope " + num(f.slope);
    }
    d += "; ";
  }
  return {r.verdict(), d.substr(0, d.size() - 2)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "anderson_lab_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"spectrum", {"k_max=8"}},
      {"evolve", {"k_max=8", "galerkin_N=20", "T=0.2"}},
      {"gibbs", {"k_max=6", "coupling=0.3", "seed=4", "galerkin_N=2", "n_samples=1000", "thin=2"}},
      {"invariance",
       {"k_max=6", "coupling=0.3", "seed=4", "galerkin_N=2", "n_samples=1000", "thin=2", "t_evolve=0.3"}},
      {"tails", {"k_max=4", "eps=0.3", "galerkin_N=10", "time_points=5"}},
      {"converge",
       {"converge_k_max=8", "galerkin_ranks=[8,16]", "dynamics_rank=20", "wick_samples=2", "T=0.2",
        "resolvent_eps=[0.4,0.2]", "dynamics_eps=[0.4,0.2]", "wick_eps=[0.4,0.2]"}}};
  int compared = 0, differing = 0;
  std::string bad;
  for (const auto& [sub, sets] : runs) {
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, 4u}) {
      cli::RunOptions o;
      o.subcommand = sub;
      o.outdir = (root / std::to_string(threads)).string();
      o.threads = threads;
      o.sets = sets;
      std::ostringstream log;
      const auto res = cli::run(o, log);
      if (res.exit_code == 1) return {false, sub + " failed: " + res.message};
      dirs.push_back(res.run_dir);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
      };
      ++compared;
      if (slurp(e.path()) != slurp(dirs[1] / e.path().filename())) {
        ++differing;
        bad += " " + sub + "/" + e.path().filename().string();
      }
    }
  }
  util::set_thread_count(0);
  fs::remove_all(root);
  return {compared > 0 && differing == 0,
          std::to_string(compared) + " CSV files compared across --threads 1 and 4, " + std::to_string(differing) +
              " differ" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }
  }
  const std::vector<Criterion> criteria{
      {1, "exact paraproduct decomposition", 10, exact_decomposition},
      {2, "paracontrolled Hamiltonian identity", 30, paracontrolled_identity},
      {3, "resolvent Cauchy property and counterterm divergence", 120, resolvent_cauchy},
      {4, "Weyl law", 180, weyl_law},
      {5, "functional calculus and group law", 5, functional_calculus},
      {6, "Wick moments", 60, wick_moments},
      {7, "coupling marginals and shift tail", 300, coupling},
      {8, "pseudo-Wick binomial identity", 30, pseudo_wick},
      {9, "partition function", 120, partition},
      {10, "dynamics quality", 120, dynamics_quality},
      {11, "Da Prato-Debussche consistency", 120, dpd_consistency},
      {12, "linear flow law preservation", 60, law_preservation},
      {13, "Gibbs invariance", 900, gibbs_invariance},
      {14, "convergence suite", 600, convergence},
      {15, "determinism across thread counts", 600, determinism}};

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
