#include <openssl/evp.h>

#include <fftw3.h>

#include <Eigen/Core>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <sstream>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/cli/cli.hpp"
#include "anderson_lab/experiments/experiments.hpp"
#include "anderson_lab/gaussian/fields.hpp"
#include "anderson_lab/gibbs/measure.hpp"
#include "anderson_lab/spectral/field_io.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/util/parallel.hpp"
#include "anderson_lab/wave/dynamics.hpp"

#ifndef ANDERSON_LAB_VERSION
#define ANDERSON_LAB_VERSION "0.0.0"
#endif

namespace anderson_lab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Outcome { success, verdict_failed };

std::string hex(const unsigned char* d, unsigned n) {
  std::ostringstream os;
  for (unsigned i = 0; i < n; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(d[i]);
  return os.str();
}

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx_); }
  Digest(const Digest&) = delete;
  Digest& operator=(const Digest&) = delete;
  void update(const char* p, std::size_t n) { EVP_DigestUpdate(ctx_, p, n); }
  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned n = 0;
    EVP_DigestFinal_ex(ctx_, md, &n);
    return hex(md, n);
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string utc_stamp(std::chrono::system_clock::time_point t, const char* format) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

/// Files written by a run, in creation order.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::function<void(std::ostream&)>& write) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os.imbue(std::locale::classic());
    write(os);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }
  void binary(const std::string& name, const std::function<void(const fs::path&)>& write) {
    write(dir_ / name);
    files_.push_back(name);
  }
  [[nodiscard]] const fs::path& dir() const { return dir_; }
  [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

anderson::OperatorConfig operator_config(const RunConfig& c) {
  anderson::OperatorConfig oc;
  oc.grid_n = c.grid_n;
  oc.k_max = c.k_max;
  oc.eps = c.eps;
  oc.seed = c.seed;
  oc.mollifier = c.mollifier == "gaussian" ? spectral::MollifierKind::gaussian : spectral::MollifierKind::sharp_cutoff;
  oc.options.coupling = c.coupling;
  oc.options.counterterm = anderson::parse_counterterm_mode(c.counterterm);
  return oc;
}

spectral::Mollifier mollifier(const RunConfig& c, double eps) {
  return spectral::Mollifier(
      eps, c.mollifier == "gaussian" ? spectral::MollifierKind::gaussian : spectral::MollifierKind::sharp_cutoff);
}

anderson::SpectralData build(const RunConfig& c, bool vectors = true) {
  auto s = anderson::build_operator(operator_config(c), vectors);
  s.mass = c.mass;
  return s;
}

wave::FlowConfig flow_config(const RunConfig& c, const anderson::SpectralData& s, double T) {
  wave::FlowConfig f(s, c.galerkin_N, mollifier(c, c.eps), c.dt, T, gibbs::parse_wick_reference(c.wick_reference));
  f.focusing = c.focusing;
  f.nonlinear = !c.disable_interaction;
  return f;
}

void write_report(Outputs& out, const experiments::ExperimentReport& r) {
  out.text("report.json", [&](std::ostream& os) { os << experiments::to_json(r).dump(2) << '\n'; });
  out.text("report.md", [&](std::ostream& os) { experiments::write_markdown(os, r); });
  if (!r.observables.empty()) out.text("observables.csv", [&](std::ostream& os) { experiments::write_observables_csv(os, r); });
  if (!r.series.empty()) out.text("series.csv", [&](std::ostream& os) { experiments::write_series_csv(os, r); });
  for (const auto& t : r.tables) {
    out.text(t.name + ".csv", [&](std::ostream& os) { experiments::write_table_csv(os, t); });
  }
}

Outcome run_sample_noise(const RunConfig& c, Outputs& out, json& summary) {
  const auto noise = anderson::operator_noise(operator_config(c));
  out.binary("xi.bin", [&](const fs::path& p) { spectral::write_field_file(p, noise.xi); });
  out.text("xi.csv", [&](std::ostream& os) { spectral::write_field_csv(os, noise.xi); });
  out.text("xi_eps.csv", [&](std::ostream& os) { spectral::write_field_csv(os, noise.xi_eps); });
  out.text("xi2_eps.csv", [&](std::ostream& os) { spectral::write_field_csv(os, noise.xi2_eps); });
  summary["grid_n"] = noise.grid().n();
  summary["c_eps"] = noise.c_eps;
  return Outcome::success;
}

Outcome run_build_operator(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  out.binary("operator.bin", [&](const fs::path& p) { anderson::write_spectral_data_file(p, s); });
  out.text("spectrum.csv", [&](std::ostream& os) { anderson::write_spectrum_csv(os, s); });
  out.text("weyl.csv", [&](std::ostream& os) {
    os << "n,lambda_over_n\n";
    os.precision(17);
    for (const auto& [n, r] : anderson::weyl_profile(s)) os << n << ',' << r << '\n';
  });
  summary["dimension"] = s.size();
  summary["K"] = s.shift_K;
  summary["counterterm"] = s.counterterm;
  summary["lambda_1"] = s.eigenvalues[0];
  return Outcome::success;
}

Outcome run_spectrum(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c, false);
  out.text("spectrum.csv", [&](std::ostream& os) { anderson::write_spectrum_csv(os, s); });
  summary["dimension"] = s.size();
  summary["lambda_1"] = s.eigenvalues[0];
  return Outcome::success;
}

Outcome run_sample_fields(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto gff = gaussian::sample_gff(gaussian::field_grid(s), c.mass, spectral::stream_key(c.seed, 0));
  const auto agff = gaussian::sample_agff(s, spectral::stream_key(c.seed, 0));
  out.binary("gff.bin", [&](const fs::path& p) { spectral::write_field_file(p, gff); });
  out.binary("agff.bin", [&](const fs::path& p) { spectral::write_field_file(p, agff); });
  out.text("gff.csv", [&](std::ostream& os) { spectral::write_field_csv(os, gff); });
  out.text("agff.csv", [&](std::ostream& os) { spectral::write_field_csv(os, agff); });
  summary["gff_H-0.1"] = spectral::sobolev_norm(gff, -0.1);
  summary["agff_H-0.1"] = spectral::sobolev_norm(agff, -0.1);
  return Outcome::success;
}

Outcome run_couple(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto pair = gaussian::coupled_sample(s, spectral::stream_key(c.seed, 0));
  out.text("phi_G.csv", [&](std::ostream& os) { spectral::write_field_csv(os, pair.phi_G); });
  out.text("phi_A.csv", [&](std::ostream& os) { spectral::write_field_csv(os, pair.phi_A); });
  out.text("h.csv", [&](std::ostream& os) { spectral::write_field_csv(os, pair.h); });
  const auto prof = gaussian::shift_regularity_profile(pair, c.shift_alpha);
  out.text("shift_profile.csv", [&](std::ostream& os) {
    os << "block,energy,partial_sum,in_tail_fit\n";
    os.precision(17);
    for (std::size_t j = 0; j < prof.blocks.size(); ++j) {
      const bool tail = std::find(prof.tail_blocks.begin(), prof.tail_blocks.end(), prof.blocks[j]) != prof.tail_blocks.end();
      os << prof.blocks[j] << ',' << prof.energy[j] << ',' << prof.partial_sums[j] << ',' << (tail ? 1 : 0) << '\n';
    }
  });
  summary["shift_alpha"] = c.shift_alpha;
  summary["tail_slope"] = prof.tail_slope;
  return Outcome::success;
}

Outcome run_wick(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto w = gaussian::wick_comparison_profile(s, mollifier(c, c.eps), c.n_samples, c.seed);
  int within = 0;
  double max_z = 0.0;
  const int n = w.grid.n();
  out.text("wick_profile.csv", [&](std::ostream& os) {
    os << "x,y,exact,monte_carlo,std_error,z\n";
    os.precision(17);
    for (std::size_t i = 0; i < w.exact.size(); ++i) {
      const double z = experiments::z_score(w.monte_carlo[i] - w.exact[i], w.std_error[i]);
      within += std::abs(z) < 3.0;
      max_z = std::max(max_z, std::abs(z));
      os << double(i / n) / n << ',' << double(i % n) / n << ',' << w.exact[i] << ',' << w.monte_carlo[i] << ','
         << w.std_error[i] << ',' << z << '\n';
    }
  });
  const double frac = w.exact.empty() ? 1.0 : double(within) / double(w.exact.size());
  summary["c_eps"] = w.c_eps;
  summary["fraction_within_3se"] = frac;
  summary["max_abs_z"] = max_z;
  const bool pass = frac >= 0.99 && max_z < 5.0;
  summary["verdict"] = pass ? "pass" : "fail";
  return pass ? Outcome::success : Outcome::verdict_failed;
}

gibbs::GibbsOptions gibbs_options(const RunConfig& c) {
  gibbs::GibbsOptions go;
  go.variant = gibbs::parse_variant(c.gibbs_variant);
  go.mode = c.sampler == "metropolis" ? gibbs::SamplerMode::metropolis : gibbs::SamplerMode::importance;
  go.thin = c.thin;
  go.disable_interaction = c.disable_interaction;
  go.reference = gibbs::parse_wick_reference(c.wick_reference);
  return go;
}

Outcome run_gibbs(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto e = gibbs::sample_gibbs(s, mollifier(c, c.eps), c.galerkin_N, c.n_samples, c.seed, gibbs_options(c));
  out.binary("ensemble.bin", [&](const fs::path& p) { gibbs::write_gibbs_ensemble_file(p, e); });
  out.text("gibbs.csv", [&](std::ostream& os) { gibbs::write_gibbs_csv(os, e); });
  summary["effective_sample_size"] = e.effective_sample_size;
  summary["acceptance_rate"] = e.acceptance_rate;
  summary["proposals"] = e.proposals;
  return Outcome::success;
}

Outcome run_evolve(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto flow = flow_config(c, s, c.T);
  const auto init = wave::gaussian_initial(s, spectral::stream_key(c.seed, 0));
  try {
    const auto traj = wave::galerkin_flow(init, flow);
    out.text("trajectory.csv", [&](std::ostream& os) { wave::write_trajectory_csv(os, traj, flow, {}, c.delta); });
    const double e0 = wave::hamiltonian_energy(traj.front(), flow);
    double drift = 0.0;
    for (const auto& p : traj) drift = std::max(drift, std::abs(wave::hamiltonian_energy(p, flow) - e0));
    summary["energy_0"] = e0;
    summary["max_energy_drift"] = drift;
    summary["relative_energy_drift"] = e0 != 0.0 ? drift / std::abs(e0) : drift;
    return Outcome::success;
  } catch (const wave::BlowupDetected& b) {
    summary["blowup_time"] = b.time;
    summary["verdict"] = "fail";
    summary["error"] = b.what();
    return Outcome::verdict_failed;
  }
}

Outcome run_local_solve(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  const auto init = wave::gaussian_initial(s, spectral::stream_key(c.seed, 0));
  auto lin = flow_config(c, s, 1.0);
  lin.nonlinear = false;
  const auto norms = wave::theta_norms(wave::galerkin_flow(init, lin), lin, c.p, c.delta);
  const double T = c.local_T > 0.0 ? c.local_T : wave::admissible_time(norms, c.p);
  const double h = std::min(c.dt, T / 20.0);
  wave::FlowConfig lin_T(s, c.galerkin_N, mollifier(c, c.eps), h, T, gibbs::parse_wick_reference(c.wick_reference));
  lin_T.nonlinear = false;
  auto nl = lin_T;
  nl.nonlinear = true;
  nl.focusing = c.focusing;
  summary["theta_norms"] = {{"linear", norms.linear}, {"quadratic", norms.quadratic}, {"cubic", norms.cubic}};
  summary["local_time_estimate"] = wave::local_time_estimate(norms, c.p);
  summary["T"] = T;
  summary["dt"] = h;
  const auto theta = wave::galerkin_flow(init, lin_T);
  try {
    const auto r = wave::dpd_local_solve(theta, nl, T, c.delta);
    const auto u = wave::galerkin_flow(init, nl);
    double gap = 0.0;
    for (std::size_t i = 0; i < u.size() && i < r.v.size(); ++i) {
      gap = std::max(gap, wave::operator_norm(s, u[i].u - theta[i].u - r.v[i], c.sobolev_exponent));
    }
    std::vector<wave::PhasePoint> sum = theta;
    for (std::size_t i = 0; i < sum.size() && i < r.v.size(); ++i) sum[i].u += r.v[i];
    out.text("trajectory.csv", [&](std::ostream& os) { wave::write_trajectory_csv(os, sum, nl, r.v, c.delta); });
    out.text("picard.csv", [&](std::ostream& os) {
      os << "iteration,increment_ratio\n";
      os.precision(17);
      for (std::size_t i = 0; i < r.contraction.size(); ++i) os << i + 1 << ',' << r.contraction[i] << '\n';
    });
    summary["iterations"] = r.iterations;
    summary["residual"] = r.residual;
    summary["contraction_factor"] = r.contraction_factor();
    summary["galerkin_gap"] = gap;
    return Outcome::success;
  } catch (const wave::NoContraction& e) {
    summary["verdict"] = "fail";
    summary["error"] = e.what();
    return Outcome::verdict_failed;
  } catch (const wave::BlowupDetected& b) {
    summary["blowup_time"] = b.time;
    summary["verdict"] = "fail";
    summary["error"] = b.what();
    return Outcome::verdict_failed;
  }
}

Outcome report_outcome(Outputs& out, const experiments::ExperimentReport& r, json& summary) {
  write_report(out, r);
  summary["verdict"] = r.verdict() ? "pass" : "fail";
  return r.verdict() ? Outcome::success : Outcome::verdict_failed;
}

Outcome run_invariance(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  experiments::InvarianceOptions o;
  o.dt = c.dt;
  o.variant = gibbs::parse_variant(c.gibbs_variant);
  o.mode = c.sampler == "metropolis" ? gibbs::SamplerMode::metropolis : gibbs::SamplerMode::importance;
  o.thin = c.thin;
  o.disable_interaction = c.disable_interaction;
  o.batches = c.batches;
  o.modes = c.observable_modes;
  const auto r = experiments::invariance_test(s, mollifier(c, c.eps), c.galerkin_N, c.t_evolve, c.n_samples, c.seed, o);
  return report_outcome(out, r, summary);
}

Outcome run_tails(const RunConfig& c, Outputs& out, json& summary) {
  const auto s = build(c);
  experiments::TailOptions o;
  o.N = c.galerkin_N;
  o.p = c.p;
  o.delta = c.delta;
  o.time_points = c.time_points;
  const auto r =
      experiments::tail_test(s, mollifier(c, c.eps), c.tail_samples, c.tail_order, c.thresholds, c.seed, o);
  return report_outcome(out, r, summary);
}

Outcome run_converge(const RunConfig& c, Outputs& out, json& summary) {
  experiments::ConvergenceConfig cc;
  cc.k_max = c.converge_k_max;
  cc.grid_n = c.grid_n;
  cc.eps = c.eps;
  cc.seed = c.seed;
  cc.operator_options = operator_config(c).options;
  cc.galerkin_ranks = c.galerkin_ranks;
  cc.dynamics_eps = c.dynamics_eps;
  cc.resolvent_eps = c.resolvent_eps;
  cc.wick_eps = c.wick_eps;
  cc.dynamics_rank = c.dynamics_rank;
  cc.dt = c.dt;
  cc.T = c.T;
  cc.wick_order = c.wick_order;
  cc.wick_samples = c.wick_samples;
  cc.sobolev_exponent = c.sobolev_exponent;
  return report_outcome(out, experiments::convergence_suite(cc), summary);
}

using Handler = Outcome (*)(const RunConfig&, Outputs&, json&);

Handler handler(const std::string& name) {
  static const std::vector<std::pair<std::string, Handler>> table{
      {"sample-noise", run_sample_noise}, {"build-operator", run_build_operator},
      {"spectrum", run_spectrum},         {"sample-fields", run_sample_fields},
      {"couple", run_couple},             {"wick", run_wick},
      {"gibbs", run_gibbs},               {"evolve", run_evolve},
      {"local-solve", run_local_solve},   {"invariance", run_invariance},
      {"tails", run_tails},               {"converge", run_converge}};
  for (const auto& [n, h] : table) {
    if (n == name) return h;
  }
  return nullptr;
}

json versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return {{"anderson_lab", ANDERSON_LAB_VERSION},
          {"compiler", __VERSION__},
          {"cplusplus", static_cast<long>(__cplusplus)},
          {"eigen", eigen.str()},
          {"fftw", std::string(fftw_version)},
          {"openssl", OPENSSL_VERSION_TEXT}};
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.finish();
}

std::string file_sha256(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    d.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return d.finish();
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"sample-noise", "build-operator", "spectrum", "sample-fields",
                                              "couple",       "wick",           "gibbs",    "evolve",
                                              "local-solve",  "invariance",     "tails",    "converge",
                                              "validate"};
  return names;
}

RunResult run(const RunOptions& opts, std::ostream& log) {
  RunResult result;
  json merged;
  RunConfig cfg;
  try {
    merged = load_config(opts.config_path);
    apply_overrides(merged, opts.sets);
    if (opts.seed) merged["seed"] = *opts.seed;
    if (opts.subcommand != "validate") merged["experiment"] = opts.subcommand;
    if (opts.outdir) {
      merged["outdir"] = *opts.outdir;
    } else if (merged["outdir"].is_string() && merged["outdir"].get<std::string>().empty()) {
      const char* env = std::getenv("ANDERSON_LAB_OUTDIR");
      merged["outdir"] = env && *env ? env : "runs";
    }
    cfg = parse_config(merged);
    merged = to_json(cfg);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = 1;
    result.message = e.what();
    return result;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = 1;
    result.message = e.what();
    return result;
  }
  if (opts.threads) util::set_thread_count(*opts.threads);

  if (opts.subcommand == "validate") {
    try {
      const auto diags = validate(cfg);
      for (const auto& d : diags) log << d.rule << ": " << d.message << '\n';
      if (diags.empty()) log << "ok\n";
      result.exit_code = diags.empty() ? 0 : 2;
      result.message = std::to_string(diags.size()) + " diagnostics";
    } catch (const std::exception& e) {
      log << "error: " << e.what() << '\n';
      result.exit_code = 1;
      result.message = e.what();
    }
    return result;
  }

  const Handler h = handler(opts.subcommand);
  if (!h) {
    log << "error: unknown subcommand '" << opts.subcommand << "'\n";
    result.exit_code = 1;
    result.message = "unknown subcommand";
    return result;
  }

  // the hash covers everything that determines the outputs
  json hashed = merged;
  hashed.erase("outdir");
  const std::string config_hash = sha256_hex(hashed.dump());
  const auto started = std::chrono::system_clock::now();
  const fs::path base = fs::path(cfg.outdir) / opts.subcommand;
  const std::string stem = utc_stamp(started, "%Y%m%dT%H%M%SZ") + "-" + config_hash.substr(0, 12);
  fs::path dir = base / stem;
  try {
    fs::create_directories(base);
    for (int k = 1; !fs::create_directory(dir); ++k) dir = base / (stem + "-" + std::to_string(k));
  } catch (const std::exception& e) {
    log << "error: cannot create output directory: " << e.what() << '\n';
    result.exit_code = 1;
    result.message = e.what();
    return result;
  }
  result.run_dir = dir;

  Outputs out(dir);
  json summary = json::object();
  const auto t0 = std::chrono::steady_clock::now();
  std::string status;
  try {
    const Outcome o = h(cfg, out, summary);
    result.exit_code = o == Outcome::success ? 0 : 2;
    status = o == Outcome::success ? "success" : "verdict_failed";
  } catch (const std::exception& e) {
    log << "error: " << opts.subcommand << ": " << e.what() << '\n';
    result.exit_code = 1;
    result.message = e.what();
    status = "error";
    summary["error"] = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json files = json::array();
  for (const auto& f : out.files()) {
    files.push_back({{"path", f}, {"sha256", file_sha256(dir / f)}, {"bytes", fs::file_size(dir / f)}});
  }
  json manifest{{"experiment", opts.subcommand},
                {"config", merged},
                {"config_hash", config_hash},
                {"seed", cfg.seed},
                {"started_utc", utc_stamp(started, "%Y-%m-%dT%H:%M:%SZ")},
                {"wall_time_seconds", wall},
                {"threads", util::thread_count()},
                {"versions", versions()},
                {"status", status},
                {"exit_code", result.exit_code},
                {"summary", summary},
                {"files", files}};
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
  log << opts.subcommand << ": " << status << " (" << std::fixed << std::setprecision(2) << wall << " s) -> "
      << dir.string() << '\n';
  if (result.message.empty()) result.message = status;
  return result;
}

}  // namespace anderson_lab::cli
