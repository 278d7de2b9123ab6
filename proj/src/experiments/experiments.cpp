#include "anderson_lab/experiments/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>

#include "anderson_lab/gaussian/fields.hpp"
#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/util/parallel.hpp"
#include "anderson_lab/util/stats.hpp"
#include "anderson_lab/wave/dynamics.hpp"

namespace anderson_lab::experiments {

using nlohmann::json;

namespace {

constexpr int kChunk = 64;
constexpr std::uint64_t kVelocityStream = 0x7E10C;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] <= v[i - 1])) return false;
  }
  return true;
}

Fit log_log_fit(const std::string& name, const std::vector<double>& x, const std::vector<double>& y, bool pass) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  Fit f{name, 0.0, 0.0, pass};
  if (lx.size() >= 2) f.slope = util::fitted_slope(lx, ly);
  return f;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Weighted Wick power of psi with variance profile a.
Eigen::ArrayXd wick_power(const Eigen::ArrayXd& psi, const Eigen::ArrayXd& a, int order) {
  if (order == 0) return Eigen::ArrayXd::Ones(psi.size());
  Eigen::ArrayXd prev = Eigen::ArrayXd::Ones(psi.size()), cur = psi;
  for (int k = 1; k < order; ++k) {
    Eigen::ArrayXd next = psi * cur - k * a * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

bool ExperimentReport::verdict() const {
  if (blowups != 0) return false;
  for (const auto& o : observables) {
    if (!o.pass) return false;
  }
  for (const auto& f : fits) {
    if (!f.pass) return false;
  }
  return true;
}

double z_score(double difference, double std_error) {
  if (std_error == 0.0) return difference == 0.0 ? 0.0 : std::copysign(INFINITY, difference);
  return difference / std_error;
}

json to_json(const ExperimentReport& r) {
  json j;
  j["name"] = r.name;
  j["config"] = r.config;
  j["seed_base"] = r.seed_base;
  j["runtime_seconds"] = r.runtime_seconds;
  j["blowups"] = r.blowups;
  j["verdict"] = r.verdict() ? "pass" : "fail";
  j["observables"] = json::array();
  for (const auto& o : r.observables) {
    j["observables"].push_back({{"name", o.name},
                                {"before", o.before},
                                {"after", o.after},
                                {"std_error", o.std_error},
                                {"z_score", std::isfinite(o.z_score) ? json(o.z_score) : json(nullptr)},
                                {"pass", o.pass}});
  }
  j["fits"] = json::array();
  for (const auto& f : r.fits) {
    j["fits"].push_back({{"name", f.name}, {"slope", f.slope}, {"std_error", f.std_error}, {"pass", f.pass}});
  }
  j["series"] = json::array();
  for (const auto& s : r.series) {
    j["series"].push_back({{"name", s.name}, {"x", s.x}, {"y", s.y}, {"y_error", s.y_error}});
  }
  j["notes"] = r.notes;
  return j;
}

void write_markdown(std::ostream& os, const ExperimentReport& r) {
  os << "# " << r.name << "\n\n";
  os << "verdict: **" << (r.verdict() ? "pass" : "fail") << "**, seed_base " << r.seed_base << ", blow-ups "
     << r.blowups << ", runtime " << fmt(r.runtime_seconds) << " s\n\n";
  if (!r.observables.empty()) {
    os << "| observable | before | after | std_error | z | pass |\n|---|---|---|---|---|---|\n";
    for (const auto& o : r.observables) {
      os << "| " << o.name << " | " << fmt(o.before) << " | " << fmt(o.after) << " | " << fmt(o.std_error) << " | "
         << fmt(o.z_score) << " | " << (o.pass ? "yes" : "no") << " |\n";
    }
    os << "\n";
  }
  if (!r.fits.empty()) {
    os << "| fit | slope | std_error | pass |\n|---|---|---|---|\n";
    for (const auto& f : r.fits) {
      os << "| " << f.name << " | " << fmt(f.slope) << " | " << fmt(f.std_error) << " | " << (f.pass ? "yes" : "no")
         << " |\n";
    }
    os << "\n";
  }
  for (const auto& s : r.series) {
    os << "series `" << s.name << "`:";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << " (" << fmt(s.x[i]) << ", " << fmt(s.y[i]) << ")";
    os << "\n\n";
  }
  for (const auto& n : r.notes) os << "- " << n << "\n";
}

void write_observables_csv(std::ostream& os, const ExperimentReport& r) {
  os << "observable,before,after,std_error,z_score,pass\n";
  os.precision(17);
  for (const auto& o : r.observables) {
    os << o.name << ',' << o.before << ',' << o.after << ',' << o.std_error << ',' << o.z_score << ','
       << (o.pass ? 1 : 0) << '\n';
  }
}

void write_series_csv(std::ostream& os, const ExperimentReport& r) {
  os << "series,x,y,y_error\n";
  os.precision(17);
  for (const auto& s : r.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os << s.name << ',' << s.x[i] << ',' << s.y[i] << ',' << (i < s.y_error.size() ? s.y_error[i] : 0.0) << '\n';
    }
  }
}

void write_table_csv(std::ostream& os, const DataTable& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  os.precision(17);
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
}

ExperimentReport invariance_test(const SpectralData& s, const Mollifier& m, int N, double t_evolve, int n_samples,
                                 std::uint64_t seed_base, const InvarianceOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (n_samples < 1000) throw std::invalid_argument("invariance_test: n_samples must be at least 1000");
  if (opts.variant != gibbs::Variant::quartic_only) {
    throw std::invalid_argument("invariance_test: the flow preserves the quartic_only measure");
  }
  if (opts.batches < 2) throw std::invalid_argument("invariance_test: need at least two batches");
  for (int n : opts.modes) {
    if (n < 1 || n > s.size()) throw std::invalid_argument("invariance_test: mode index out of range");
  }
  ExperimentReport r;
  r.name = "invariance";
  r.seed_base = seed_base;
  r.config = {{"k_max", s.basis.k_max()},  {"grid_n", s.grid_n},       {"operator_eps", s.eps},
              {"operator_seed", s.seed},   {"mollifier_eps", m.epsilon()}, {"N", N},
              {"t_evolve", t_evolve},      {"n_samples", n_samples},   {"dt", opts.dt},
              {"thin", opts.thin},         {"sampler", opts.mode == gibbs::SamplerMode::metropolis ? "metropolis" : "importance"},
              {"interaction", !opts.disable_interaction}};

  gibbs::GibbsOptions go;
  go.mode = opts.mode;
  go.thin = opts.thin;
  go.disable_interaction = opts.disable_interaction;
  const auto ensemble = gibbs::sample_gibbs(s, m, N, n_samples, seed_base, go);
  const auto weights = ensemble.normalized_weights();
  r.notes.push_back("effective sample size " + fmt(ensemble.effective_sample_size) + " of " +
                    std::to_string(ensemble.proposals) + " proposals, acceptance rate " +
                    fmt(ensemble.acceptance_rate));

  wave::FlowConfig flow(s, N, m, opts.dt, t_evolve);
  flow.nonlinear = !opts.disable_interaction;
  const auto& pot = flow.potential();
  const auto M = s.size();
  // rho^2 on the real basis, for int (rho * u)^2
  Eigen::VectorXd rho2(M);
  for (int p = 0; p < M; ++p) rho2[p] = std::pow(m.symbol(s.basis.real_modes()[p].k.norm2()), 2);

  std::vector<std::string> names;
  for (int n : opts.modes) names.push_back("u_f" + std::to_string(n) + "_sq");
  names.insert(names.end(), {"smoothed_l2_sq", "interaction_V", "velocity_l2_sq"});
  const std::size_t n_obs = names.size();

  auto observe = [&](const wave::PhasePoint& p) {
    std::vector<double> v;
    for (int n : opts.modes) v.push_back(p.u[n - 1] * p.u[n - 1]);
    const Eigen::VectorXd real = s.eigenvectors * p.u;
    v.push_back(real.cwiseProduct(real).dot(rho2));
    v.push_back(pot.quartic(p.u));
    v.push_back(p.ut.squaredNorm());
    return v;
  };

  struct Pair {
    std::vector<double> before, after;
    bool blowup = false;
  };
  const auto pairs = util::parallel_map<Pair>(ensemble.samples.size(), [&](std::size_t i) {
    spectral::GaussianStream rng(spectral::stream_key(seed_base, i), kVelocityStream);
    wave::PhasePoint p{ensemble.samples[i], Eigen::VectorXd(M), 0.0};
    for (int n = 0; n < M; ++n) p.ut[n] = rng.normal();
    Pair out;
    out.before = observe(p);
    try {
      out.after = observe(wave::galerkin_evolve(p, flow, t_evolve));
    } catch (const wave::BlowupDetected&) {
      out.blowup = true;
    }
    return out;
  });

  DataTable table{"samples", {"sample_index", "observable", "before", "after"}, {}};
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].blowup) {
      ++r.blowups;
      continue;
    }
    kept.push_back(i);
    for (std::size_t k = 0; k < n_obs; ++k) {
      table.rows.push_back({double(i), double(k), pairs[i].before[k], pairs[i].after[k]});
    }
  }
  r.tables.push_back(std::move(table));
  r.notes.push_back("observable ids in samples.csv follow the order of the observables table");

  for (std::size_t k = 0; k < n_obs; ++k) {
    Observable o;
    o.name = names[k];
    if (opts.mode == gibbs::SamplerMode::importance) {
      util::CompensatedSum ws, wb, wa, wd;
      for (std::size_t i : kept) {
        ws.add(weights[i]);
        wb.add(weights[i] * pairs[i].before[k]);
        wa.add(weights[i] * pairs[i].after[k]);
        wd.add(weights[i] * (pairs[i].after[k] - pairs[i].before[k]));
      }
      o.before = wb.value() / ws.value();
      o.after = wa.value() / ws.value();
      const double dbar = wd.value() / ws.value();
      util::CompensatedSum var;
      for (std::size_t i : kept) {
        const double d = pairs[i].after[k] - pairs[i].before[k] - dbar;
        var.add(weights[i] * weights[i] * d * d);
      }
      o.std_error = std::sqrt(var.value()) / ws.value();
      o.z_score = z_score(dbar, o.std_error);
    } else {
      // chain order batch means
      util::MomentAccumulator b, a;
      const std::size_t B = static_cast<std::size_t>(opts.batches);
      std::vector<util::CompensatedSum> batch(B);
      std::vector<long> count(B, 0);
      for (std::size_t j = 0; j < kept.size(); ++j) {
        const std::size_t i = kept[j];
        b.add(pairs[i].before[k]);
        a.add(pairs[i].after[k]);
        const std::size_t slot = std::min(B - 1, j * B / kept.size());
        batch[slot].add(pairs[i].after[k] - pairs[i].before[k]);
        ++count[slot];
      }
      util::MomentAccumulator means;
      for (std::size_t q = 0; q < B; ++q) {
        if (count[q] > 0) means.add(batch[q].value() / count[q]);
      }
      o.before = b.mean();
      o.after = a.mean();
      o.std_error = means.std_error();
      o.z_score = z_score(o.after - o.before, o.std_error);
    }
    o.pass = std::abs(o.z_score) < 3.0;
    r.observables.push_back(o);
  }
  if (n_obs > 5) {
    r.notes.push_back(std::to_string(n_obs) + " observables at |z| < 3: family-wise false alarm rate at most " +
                      fmt(100.0 * n_obs * std::erfc(3.0 / std::sqrt(2.0))) + "% (Bonferroni)");
  }
  if (r.blowups > 0) r.notes.push_back(std::to_string(r.blowups) + " trajectories blew up and were excluded");
  r.runtime_seconds = seconds_since(t0);
  return r;
}

ExperimentReport tail_test(const SpectralData& s, const Mollifier& m, int n_samples, int order,
                           const std::vector<double>& thresholds, std::uint64_t seed_base, const TailOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (n_samples < 10000) throw std::invalid_argument("tail_test: n_samples must be at least 10^4");
  if (order < 1) throw std::invalid_argument("tail_test: order must be positive");
  if (opts.time_points < 2) throw std::invalid_argument("tail_test: need at least two time points");
  ExperimentReport r;
  r.name = "tails";
  r.seed_base = seed_base;
  r.config = {{"k_max", s.basis.k_max()}, {"operator_eps", s.eps}, {"operator_seed", s.seed},
              {"mollifier_eps", m.epsilon()}, {"order", order}, {"n_samples", n_samples},
              {"N", opts.N}, {"p", opts.p}, {"delta", opts.delta}, {"time_points", opts.time_points}};

  const gibbs::QuarticPotential pot(s, m, std::min(opts.N, s.size()));
  const Eigen::Map<const Eigen::ArrayXd> a(pot.profile().data(), static_cast<Eigen::Index>(pot.profile().size()));
  const int chunks = (n_samples + kChunk - 1) / kChunk;
  const auto parts = util::parallel_map<std::vector<double>>(chunks, [&](std::size_t c) {
    std::vector<double> out;
    const int lo = static_cast<int>(c) * kChunk;
    const int hi = std::min(n_samples, lo + kChunk);
    for (int i = lo; i < hi; ++i) {
      const auto init = wave::gaussian_initial(s, spectral::stream_key(seed_base, static_cast<std::uint64_t>(i)));
      double acc = 0.0;
      for (int j = 0; j < opts.time_points; ++j) {
        const double t = double(j) / (opts.time_points - 1);
        const Eigen::ArrayXd psi = pot.smoothed(wave::linear_propagate(init, t, s).u).array();
        const Eigen::ArrayXd w = wick_power(psi, a, order);
        const auto f = spectral::SpectralField::from_values(pot.grid(), std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
        acc += std::pow(spectral::besov_norm(f, -order * opts.delta, spectral::Exponent::infinity,
                                             spectral::Exponent::infinity),
                        opts.p);
      }
      out.push_back(std::pow(acc / opts.time_points, 1.0 / opts.p));
    }
    return out;
  });
  std::vector<double> norms;
  for (const auto& p : parts) norms.insert(norms.end(), p.begin(), p.end());

  std::vector<double> grid = thresholds;
  if (grid.empty()) {
    std::vector<double> sorted = norms;
    std::sort(sorted.begin(), sorted.end());
    const double top = sorted[static_cast<std::size_t>(0.999 * (sorted.size() - 1))];
    for (int j = 0; j <= 12; ++j) grid.push_back(top * j / 12.0);
  }
  std::sort(grid.begin(), grid.end());

  Series surv{"survival", {}, {}, {}}, logs{"log_survival", {}, {}, {}};
  std::vector<double> fx, fy, fw;
  const double n = static_cast<double>(n_samples);
  for (double R : grid) {
    const auto count = std::count_if(norms.begin(), norms.end(), [R](double v) { return v >= R; });
    const double S = static_cast<double>(count) / n;
    surv.x.push_back(R);
    surv.y.push_back(S);
    surv.y_error.push_back(std::sqrt(S * (1.0 - S) / n));
    logs.x.push_back(R);
    logs.y.push_back(count > 0 ? std::log(S) : -INFINITY);
    logs.y_error.push_back(count > 0 ? std::sqrt((1.0 - S) / (n * S)) : INFINITY);
    if (count >= 5 && S < 1.0) {
      fx.push_back(R);
      fy.push_back(std::log(S));
      fw.push_back(n * S / (1.0 - S));
    }
  }
  r.series = {surv, logs};

  Fit fit{"log_survival_slope", 0.0, 0.0, false};
  if (fx.size() >= 2) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
      sw += fw[i];
      sx += fw[i] * fx[i];
      sy += fw[i] * fy[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
      sxx += fw[i] * (fx[i] - mx) * (fx[i] - mx);
      sxy += fw[i] * (fx[i] - mx) * (fy[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.std_error = std::sqrt(1.0 / sxx);
    fit.pass = fit.slope + 1.96 * fit.std_error < 0.0;
  } else {
    r.notes.push_back("fewer than two thresholds with at least five exceedances; slope not fitted");
  }
  r.fits.push_back(fit);
  const bool monotone = non_increasing(surv.y);
  r.fits.push_back({"survival_non_increasing", 0.0, 0.0, monotone});

  DataTable table{"norms", {"sample_index", "norm"}, {}};
  for (std::size_t i = 0; i < norms.size(); ++i) table.rows.push_back({double(i), norms[i]});
  r.tables.push_back(std::move(table));
  r.runtime_seconds = seconds_since(t0);
  return r;
}

ExperimentReport convergence_suite(const ConvergenceConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "converge";
  r.seed_base = cfg.seed;
  r.config = {{"k_max", cfg.k_max},
              {"grid_n", cfg.grid_n},
              {"eps", cfg.eps},
              {"seed", cfg.seed},
              {"coupling", cfg.operator_options.coupling},
              {"counterterm", anderson::to_string(cfg.operator_options.counterterm)},
              {"galerkin_ranks", cfg.galerkin_ranks},
              {"dynamics_eps", cfg.dynamics_eps},
              {"resolvent_eps", cfg.resolvent_eps},
              {"wick_eps", cfg.wick_eps},
              {"dynamics_rank", cfg.dynamics_rank},
              {"dt", cfg.dt},
              {"T", cfg.T},
              {"wick_order", cfg.wick_order},
              {"wick_samples", cfg.wick_samples},
              {"sobolev_exponent", cfg.sobolev_exponent}};

  auto op_config = [&](double eps) {
    anderson::OperatorConfig oc;
    oc.k_max = cfg.k_max;
    oc.grid_n = cfg.grid_n;
    oc.eps = eps;
    oc.seed = cfg.seed;
    oc.options = cfg.operator_options;
    return oc;
  };
  const auto S = anderson::build_operator(op_config(cfg.eps));
  const auto initial = wave::gaussian_initial(S, spectral::stream_key(cfg.seed, 1));

  auto sup_gap = [&](const std::vector<wave::PhasePoint>& a, const std::vector<wave::PhasePoint>& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      g = std::max(g, wave::operator_norm(S, a[i].u - b[i].u, cfg.sobolev_exponent));
    }
    return g;
  };
  auto add_study = [&](const std::string& name, const std::vector<double>& x, const std::vector<double>& gaps,
                       const std::string& what) {
    r.series.push_back({name, x, gaps, std::vector<double>(gaps.size(), 0.0)});
    const bool pass = non_increasing(gaps);
    r.fits.push_back(log_log_fit(name + "_rate", x, gaps, pass));
    r.notes.push_back(name + ": " + what + (pass ? " (monotone)" : " (not monotone)"));
  };

  // Galerkin rank: |u^N - u^{2N}|
  {
    std::map<int, std::vector<wave::PhasePoint>> flows;
    int top = 0;
    for (int N : cfg.galerkin_ranks) top = std::max(top, 2 * N);
    if (top > S.size()) throw std::invalid_argument("convergence_suite: Galerkin rank exceeds the basis dimension");
    auto flow_for = [&](int N) -> const std::vector<wave::PhasePoint>& {
      auto it = flows.find(N);
      if (it != flows.end()) return it->second;
      const double probe = 0.5 / std::sqrt(S.shifted(top - 1));
      wave::FlowConfig fc(S, N, Mollifier(cfg.eps), std::min(cfg.dt, probe), cfg.T);
      return flows.emplace(N, wave::galerkin_flow(initial, fc)).first->second;
    };
    std::vector<double> x, gaps;
    for (int N : cfg.galerkin_ranks) {
      x.push_back(N);
      gaps.push_back(sup_gap(flow_for(N), flow_for(2 * N)));
    }
    add_study("galerkin_rank", x, gaps, "sup_t |u^N - u^2N| in H^" + fmt(cfg.sobolev_exponent));
  }

  // Mollifier in the nonlinearity: |u^eps - u^{eps/2}|
  {
    std::map<double, std::vector<wave::PhasePoint>> flows;
    auto flow_for = [&](double eps) -> const std::vector<wave::PhasePoint>& {
      auto it = flows.find(eps);
      if (it != flows.end()) return it->second;
      wave::FlowConfig fc(S, cfg.dynamics_rank, Mollifier(eps), cfg.dt, cfg.T);
      return flows.emplace(eps, wave::galerkin_flow(initial, fc)).first->second;
    };
    std::vector<double> x, gaps;
    for (double eps : cfg.dynamics_eps) {
      x.push_back(eps);
      gaps.push_back(sup_gap(flow_for(eps), flow_for(eps / 2)));
    }
    add_study("dynamics_eps", x, gaps, "sup_t |u^eps - u^eps/2| in H^" + fmt(cfg.sobolev_exponent));
  }

  // Resolvent: |(H_eps + c)^-1 - (H_{eps/2} + c)^-1|
  {
    std::map<double, SpectralData> ops;
    for (double eps : cfg.resolvent_eps) {
      for (double e : {eps, eps / 2}) {
        if (!ops.count(e)) ops.emplace(e, anderson::build_operator(op_config(e)));
      }
    }
    double shift = 1.0;
    for (const auto& [e, op] : ops) shift = std::max(shift, 1.0 - op.eigenvalues[0]);
    std::vector<double> x, gaps, to_finest;
    const auto& finest = ops.begin()->second;
    for (double eps : cfg.resolvent_eps) {
      x.push_back(eps);
      gaps.push_back(anderson::resolvent_distance(ops.at(eps), ops.at(eps / 2), shift));
      to_finest.push_back(anderson::resolvent_distance(ops.at(eps), finest, shift));
    }
    add_study("resolvent_eps", x, to_finest, "|R_eps - R_finest| at shift " + fmt(shift));
    r.series.push_back({"resolvent_consecutive", x, gaps, std::vector<double>(x.size(), 0.0)});
    r.notes.push_back(std::string("resolvent_consecutive: |R_eps - R_eps/2| ") +
                      (non_increasing(gaps) ? "(monotone)" : "(not monotone)"));
  }

  // Pseudo-Wick powers of the AGFF: E |W_eps - W_{eps/2}|
  {
    std::vector<gaussian::CoupledPair> pairs;
    for (int i = 0; i < cfg.wick_samples; ++i) {
      pairs.push_back(gaussian::coupled_sample(S, spectral::stream_key(cfg.seed, 100 + static_cast<std::uint64_t>(i))));
    }
    std::vector<double> x, gaps;
    for (double eps : cfg.wick_eps) {
      util::CompensatedSum acc;
      for (const auto& p : pairs) {
        const auto a = gaussian::pseudo_wick_agff(p, cfg.wick_order, Mollifier(eps)).direct.value;
        const auto b = gaussian::pseudo_wick_agff(p, cfg.wick_order, Mollifier(eps / 2)).direct.value;
        acc.add(spectral::sobolev_norm(a - b, cfg.sobolev_exponent));
      }
      x.push_back(eps);
      gaps.push_back(pairs.empty() ? 0.0 : acc.value() / static_cast<double>(pairs.size()));
    }
    add_study("wick_eps", x, gaps, "E |W_eps - W_eps/2| in H^" + fmt(cfg.sobolev_exponent));
  }

  r.runtime_seconds = seconds_since(t0);
  return r;
}

}  // namespace anderson_lab::experiments
