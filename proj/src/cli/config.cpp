#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "anderson_lab/anderson/operator.hpp"
#include "anderson_lab/cli/cli.hpp"
#include "anderson_lab/gibbs/measure.hpp"

namespace anderson_lab::cli {

using nlohmann::json;

namespace {

using Check = std::function<std::optional<std::string>(const RunConfig&)>;

struct Field {
  std::string key;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
  Check check;
};

template <typename T>
T convert(const std::string& key, const json& v);

template <>
int convert<int>(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}
template <>
std::uint64_t convert<std::uint64_t>(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ConfigError(key, "expected an unsigned integer");
}
template <>
double convert<double>(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}
template <>
bool convert<bool>(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}
template <>
std::string convert<std::string>(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}
template <>
std::vector<int> convert<std::vector<int>>(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(convert<int>(key, e));
  return out;
}
template <>
std::vector<double> convert<std::vector<double>>(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(convert<double>(key, e));
  return out;
}

template <typename T>
Field field(std::string key, T RunConfig::*member, std::function<bool(const T&)> ok = {}, std::string rule = {}) {
  Field f;
  f.key = key;
  f.set = [key, member](RunConfig& c, const json& v) { c.*member = convert<T>(key, v); };
  f.get = [member](const RunConfig& c) { return json(c.*member); };
  if (ok) {
    f.check = [member, ok, rule](const RunConfig& c) -> std::optional<std::string> {
      if (ok(c.*member)) return std::nullopt;
      return rule;
    };
  }
  return f;
}

template <typename T>
std::function<bool(const T&)> at_least(T lo) {
  return [lo](const T& v) { return v >= lo; };
}
std::function<bool(const double&)> positive() {
  return [](const double& v) { return v > 0.0 && std::isfinite(v); };
}
std::function<bool(const std::vector<double>&)> all_positive() {
  return [](const std::vector<double>& v) {
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) return false;
    }
    return true;
  };
}
std::function<bool(const std::string&)> one_of(std::vector<std::string> options) {
  return [options](const std::string& s) { return std::find(options.begin(), options.end(), s) != options.end(); };
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(field<std::string>("experiment", &RunConfig::experiment));
    t.push_back(field<std::string>("outdir", &RunConfig::outdir));
    t.push_back(field<std::uint64_t>("seed", &RunConfig::seed));
    t.push_back(field<int>(
        "grid_n", &RunConfig::grid_n, [](const int& n) { return n == 0 || (n >= 4 && n % 2 == 0 && n <= 1024); },
        "must be 0 (automatic) or an even integer in [4, 1024]"));
    t.push_back(field<int>(
        "k_max", &RunConfig::k_max, [](const int& k) { return k >= 1 && k <= 48; }, "must lie in [1, 48]"));
    t.push_back(field<double>(
        "eps", &RunConfig::eps, [](const double& e) { return e >= 0.0 && std::isfinite(e); }, "must be >= 0"));
    t.push_back(field<std::string>("mollifier", &RunConfig::mollifier, one_of({"gaussian", "sharp_cutoff"}),
                                  "must be gaussian or sharp_cutoff"));
    t.push_back(field<double>(
        "coupling", &RunConfig::coupling, [](const double& g) { return g >= 0.0 && std::isfinite(g); },
        "must be >= 0"));
    t.push_back(field<std::string>("counterterm", &RunConfig::counterterm, one_of({"basis", "grid", "none"}),
                                  "must be basis, grid or none"));
    t.push_back(field<double>("mass", &RunConfig::mass, positive(), "must be > 0"));
    t.push_back(field<int>("galerkin_N", &RunConfig::galerkin_N, at_least(1), "must be >= 1"));
    t.push_back(field<double>("dt", &RunConfig::dt, positive(), "must be > 0"));
    t.push_back(field<double>(
        "T", &RunConfig::T, [](const double& v) { return v >= 0.0 && std::isfinite(v); }, "must be >= 0"));
    t.push_back(field<double>(
        "t_evolve", &RunConfig::t_evolve, [](const double& v) { return v >= 0.0 && std::isfinite(v); },
        "must be >= 0"));
    t.push_back(field<int>("n_samples", &RunConfig::n_samples, at_least(1), "must be >= 1"));
    t.push_back(field<bool>("focusing", &RunConfig::focusing));
    t.push_back(field<std::string>("gibbs_variant", &RunConfig::gibbs_variant,
                                  one_of({"quartic_only", "quartic_plus_K"}), "must be quartic_only or quartic_plus_K"));
    t.push_back(field<std::string>("sampler", &RunConfig::sampler, one_of({"metropolis", "importance"}),
                                  "must be metropolis or importance"));
    t.push_back(field<int>("thin", &RunConfig::thin, at_least(1), "must be >= 1"));
    t.push_back(field<std::string>("wick_reference", &RunConfig::wick_reference,
                                  one_of({"agff_profile", "gff_constant"}), "must be agff_profile or gff_constant"));
    t.push_back(field<bool>("disable_interaction", &RunConfig::disable_interaction));
    t.push_back(field<std::vector<int>>(
        "observable_modes", &RunConfig::observable_modes,
        [](const std::vector<int>& v) { return std::all_of(v.begin(), v.end(), [](int n) { return n >= 1; }); },
        "entries must be >= 1"));
    t.push_back(field<int>("batches", &RunConfig::batches, at_least(2), "must be >= 2"));
    t.push_back(field<int>(
        "wick_order", &RunConfig::wick_order, [](const int& m) { return m >= 1 && m <= 8; }, "must lie in [1, 8]"));
    t.push_back(field<double>(
        "shift_alpha", &RunConfig::shift_alpha, [](const double& a) { return a >= 0.0 && a < 2.0; },
        "must lie in [0, 2)"));
    t.push_back(field<int>("p", &RunConfig::p, at_least(2), "must be >= 2"));
    t.push_back(field<double>(
        "delta", &RunConfig::delta, [](const double& d) { return d > 0.0 && d < 1.0; }, "must lie in (0, 1)"));
    t.push_back(field<double>(
        "local_T", &RunConfig::local_T, [](const double& v) { return v >= 0.0 && v <= 1.0; },
        "must lie in [0, 1]; 0 selects the admissible time"));
    t.push_back(field<int>("time_points", &RunConfig::time_points, at_least(2), "must be >= 2"));
    t.push_back(field<int>(
        "tail_order", &RunConfig::tail_order, [](const int& m) { return m >= 1 && m <= 8; }, "must lie in [1, 8]"));
    t.push_back(field<int>("tail_samples", &RunConfig::tail_samples, at_least(10000), "must be >= 10000"));
    t.push_back(field<std::vector<double>>(
        "thresholds", &RunConfig::thresholds,
        [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; }); },
        "entries must be >= 0"));
    t.push_back(field<std::vector<int>>(
        "galerkin_ranks", &RunConfig::galerkin_ranks,
        [](const std::vector<int>& v) { return std::all_of(v.begin(), v.end(), [](int n) { return n >= 1; }); },
        "entries must be >= 1"));
    t.push_back(field<std::vector<double>>("dynamics_eps", &RunConfig::dynamics_eps, all_positive(),
                                          "entries must be > 0"));
    t.push_back(field<std::vector<double>>("resolvent_eps", &RunConfig::resolvent_eps, all_positive(),
                                          "entries must be > 0"));
    t.push_back(field<std::vector<double>>("wick_eps", &RunConfig::wick_eps, all_positive(), "entries must be > 0"));
    t.push_back(field<int>("dynamics_rank", &RunConfig::dynamics_rank, at_least(1), "must be >= 1"));
    t.push_back(field<int>("wick_samples", &RunConfig::wick_samples, at_least(1), "must be >= 1"));
    t.push_back(field<int>(
        "converge_k_max", &RunConfig::converge_k_max, [](const int& k) { return k >= 1 && k <= 48; },
        "must lie in [1, 48]"));
    t.push_back(field<double>(
        "sobolev_exponent", &RunConfig::sobolev_exponent, [](const double& s) { return s > -2.0 && s < 2.0; },
        "must lie in (-2, 2)"));
    return t;
  }();
  return table;
}

}  // namespace

json default_config() { return to_json(RunConfig{}); }

json to_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& f : fields()) j[f.key] = f.get(c);
  return j;
}

RunConfig parse_config(const json& merged) {
  if (!merged.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  for (const auto& [key, value] : merged.items()) {
    const bool known =
        std::any_of(fields().begin(), fields().end(), [&key = key](const Field& f) { return f.key == key; });
    if (!known) throw ConfigError(key, "unknown key");
  }
  RunConfig c;
  for (const auto& f : fields()) {
    if (merged.contains(f.key)) f.set(c, merged.at(f.key));
  }
  for (const auto& f : fields()) {
    if (!f.check) continue;
    if (auto err = f.check(c)) throw ConfigError(f.key, *err);
  }
  return c;
}

void apply_overrides(json& config, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(s, "override must have the form key=value");
    const std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    if (!std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.key == key; })) {
      throw ConfigError(key, "unknown key");
    }
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    config[key] = v;
  }
}

json load_config(const std::optional<std::filesystem::path>& path) {
  json merged = default_config();
  if (!path) return merged;
  std::ifstream in(*path);
  if (!in) throw ConfigError("--config", "cannot open " + path->string());
  json file = json::parse(in, nullptr, false);
  if (file.is_discarded()) throw ConfigError("--config", "file is not valid JSON: " + path->string());
  if (!file.is_object()) throw ConfigError("--config", "top level must be a JSON object");
  for (const auto& [key, value] : file.items()) {
    if (!merged.contains(key)) throw ConfigError(key, "unknown key");
    merged[key] = value;
  }
  return merged;
}

std::vector<Diagnostic> validate(const RunConfig& c) {
  std::vector<Diagnostic> out;
  const int grid = c.grid_n > 0 ? c.grid_n : anderson::default_grid(c.k_max);
  if (3 * c.k_max > grid) {
    out.push_back({"dealiasing", "k_max " + std::to_string(c.k_max) + " exceeds grid/3 = " +
                                     std::to_string(grid / 3) + " for grid_n " + std::to_string(grid)});
  } else if (6 * c.k_max > grid) {
    out.push_back({"operator_grid", "operator assembly needs grid_n >= 6 k_max = " + std::to_string(6 * c.k_max) +
                                        ", got " + std::to_string(grid)});
  }
  const int M = anderson::Basis(c.k_max).size();
  if (c.galerkin_N > M) {
    out.push_back({"galerkin_rank", "galerkin_N " + std::to_string(c.galerkin_N) + " exceeds the basis dimension " +
                                        std::to_string(M)});
  }
  for (int n : c.observable_modes) {
    if (n > M) out.push_back({"observable_modes", "mode " + std::to_string(n) + " exceeds the basis dimension"});
  }
  if (out.empty()) {
    anderson::OperatorConfig oc;
    oc.grid_n = c.grid_n;
    oc.k_max = c.k_max;
    oc.eps = c.eps;
    oc.seed = c.seed;
    oc.mollifier = c.mollifier == "gaussian" ? spectral::MollifierKind::gaussian : spectral::MollifierKind::sharp_cutoff;
    oc.options.coupling = c.coupling;
    oc.options.counterterm = anderson::parse_counterterm_mode(c.counterterm);
    auto s = anderson::build_operator(oc, false);
    s.mass = c.mass;
    const double omega = std::sqrt(s.shifted(c.galerkin_N - 1));
    const double limit = 0.5 / omega;
    if (c.dt > limit) {
      std::ostringstream os;
      os << "dt " << c.dt << " exceeds the time step rule dt <= 0.5 / sqrt(lambda_N + K + mass) = " << limit
         << " at N = " << c.galerkin_N;
      out.push_back({"time_step", os.str()});
    }
  }
  const int Mc = anderson::Basis(c.converge_k_max).size();
  for (int n : c.galerkin_ranks) {
    if (2 * n > Mc) {
      out.push_back({"galerkin_ranks", "rank " + std::to_string(n) + " needs 2N <= " + std::to_string(Mc) +
                                           " modes at converge_k_max " + std::to_string(c.converge_k_max)});
    }
  }
  if (c.dynamics_rank > Mc) {
    out.push_back({"dynamics_rank", "dynamics_rank exceeds the basis dimension at converge_k_max"});
  }
  return out;
}

}  // namespace anderson_lab::cli
