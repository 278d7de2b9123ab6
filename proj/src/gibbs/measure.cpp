#include "anderson_lab/gibbs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "anderson_lab/gaussian/fields.hpp"
#include "anderson_lab/spectral/field_io.hpp"
#include "anderson_lab/spectral/random.hpp"
#include "anderson_lab/util/parallel.hpp"
#include "anderson_lab/util/stats.hpp"

namespace anderson_lab::gibbs {

namespace le = spectral::le;

namespace {

constexpr int kChunk = 64;
constexpr std::uint64_t kChainStream = 0x6A3E5;
constexpr char kMagic[4] = {'A', 'L', 'G', 'E'};
constexpr std::uint32_t kVersion = 1;

double grid_mean(const Eigen::VectorXd& v) {
  util::CompensatedSum acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v[i]);
  return acc.value() / static_cast<double>(v.size());
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double potential(const QuarticPotential& pot, double K, const Eigen::VectorXd& u, Variant variant) {
  double v = pot.quartic(u);
  if (variant == Variant::quartic_plus_K) v -= 0.5 * K * pot.wick_square(u);
  return v;
}

std::vector<double> proposal_potentials(const SpectralData& s, const QuarticPotential& pot, Variant variant,
                                        long total, std::uint64_t seed_base, bool disabled) {
  const long chunks = (total + kChunk - 1) / kChunk;
  const auto parts = util::parallel_map<std::vector<double>>(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const long lo = static_cast<long>(c) * kChunk;
    const long hi = std::min(total, lo + kChunk);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (long i = lo; i < hi; ++i) {
      if (disabled) {
        out.push_back(0.0);
        continue;
      }
      const auto u = gaussian::agff_coordinates(s, spectral::stream_key(seed_base, static_cast<std::uint64_t>(i)));
      out.push_back(potential(pot, s.shift_K, u, variant));
    }
    return out;
  });
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(total));
  for (const auto& p : parts) v.insert(v.end(), p.begin(), p.end());
  return v;
}

double effective_size(const std::vector<double>& V) {
  const double lo = *std::min_element(V.begin(), V.end());
  util::CompensatedSum s1, s2;
  for (double v : V) {
    const double w = std::exp(-(v - lo));
    s1.add(w);
    s2.add(w * w);
  }
  return s1.value() * s1.value() / s2.value();
}

}  // namespace

WickReference parse_wick_reference(const std::string& s) {
  if (s == "agff_profile") return WickReference::agff_profile;
  if (s == "gff_constant") return WickReference::gff_constant;
  throw std::invalid_argument("unknown wick reference: " + s);
}

std::string to_string(WickReference r) {
  return r == WickReference::agff_profile ? "agff_profile" : "gff_constant";
}

Variant parse_variant(const std::string& s) {
  if (s == "quartic_only") return Variant::quartic_only;
  if (s == "quartic_plus_K") return Variant::quartic_plus_K;
  throw std::invalid_argument("unknown gibbs variant: " + s);
}

std::string to_string(Variant v) { return v == Variant::quartic_only ? "quartic_only" : "quartic_plus_K"; }

QuarticPotential::QuarticPotential(const SpectralData& s, const Mollifier& m, int N, WickReference reference)
    : rank_(N <= 0 ? s.size() : N), eps_(m.epsilon()), reference_(reference), grid_(gaussian::field_grid(s)) {
  if (!s.has_vectors()) throw std::invalid_argument("QuarticPotential: eigenvectors required");
  if (rank_ > s.size()) throw std::invalid_argument("QuarticPotential: N exceeds the basis dimension");
  const auto points = static_cast<Eigen::Index>(grid_.size());
  modes_.resize(points, rank_);
  for (int n = 0; n < rank_; ++n) {
    const auto v = spectral::mollify(s.eigenfunction_field(n, grid_), m).values();
    modes_.col(n) = as_vector(v);
  }
  std::vector<double> agff(grid_.size(), 0.0);
  for (int n = 0; n < rank_; ++n) {
    const double w = 1.0 / s.shifted(n);
    for (Eigen::Index x = 0; x < points; ++x) agff[x] += w * modes_(x, n) * modes_(x, n);
  }
  const double c = gaussian::wick_constant(m, s.shift_K + s.mass, s.basis.k_max());
  gap_.resize(agff.size());
  for (std::size_t x = 0; x < agff.size(); ++x) gap_[x] = agff[x] - c;
  profile_ = reference == WickReference::agff_profile ? agff : std::vector<double>(agff.size(), c);
  const Eigen::VectorXd a = as_vector(profile_);
  a2_ = grid_mean(a.array().square().matrix());
}

Eigen::VectorXd QuarticPotential::smoothed(const Eigen::VectorXd& u) const {
  if (u.size() < rank_) throw std::invalid_argument("QuarticPotential: coordinate vector too short");
  return modes_ * u.head(rank_);
}

double QuarticPotential::quartic(const Eigen::VectorXd& u) const {
  const Eigen::ArrayXd p = smoothed(u).array();
  const Eigen::ArrayXd a = as_vector(profile_).array();
  const Eigen::ArrayXd p2 = p * p;
  return 0.25 * grid_mean((p2 * p2 - 6.0 * a * p2 + 3.0 * a * a).matrix());
}

double QuarticPotential::wick_square(const Eigen::VectorXd& u) const {
  const Eigen::ArrayXd p = smoothed(u).array();
  return grid_mean((p * p - as_vector(profile_).array()).matrix());
}

Eigen::VectorXd QuarticPotential::force(const Eigen::VectorXd& u) const {
  const Eigen::ArrayXd p = smoothed(u).array();
  const Eigen::VectorXd g = (p * p * p - 3.0 * as_vector(profile_).array() * p).matrix();
  return -(modes_.transpose() * g) / static_cast<double>(g.size());
}

double QuarticPotential::ground_value() const { return 0.75 * a2_; }
double QuarticPotential::lower_bound() const { return -1.5 * a2_; }

GibbsWeight interaction(const QuarticPotential& pot, double K, const Eigen::VectorXd& u, Variant variant) {
  const double v = potential(pot, K, u, variant);
  return {-v, v, variant};
}

GibbsWeight interaction(const SpectralField& field, const SpectralData& s, const Mollifier& m, int N,
                        Variant variant) {
  const QuarticPotential pot(s, m, N);
  const Eigen::VectorXd u = s.coordinates(s.basis.restrict(field)).real();
  return interaction(pot, s.shift_K, u, variant);
}

std::vector<double> GibbsEnsemble::normalized_weights() const {
  std::vector<double> w(weights.size(), 1.0);
  if (mode != SamplerMode::importance || w.empty()) return w;
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& g : weights) hi = std::max(hi, g.log_weight);
  util::CompensatedSum total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(weights[i].log_weight - hi);
    total.add(w[i]);
  }
  const double scale = static_cast<double>(w.size()) / total.value();
  for (double& x : w) x *= scale;
  return w;
}

SpectralField GibbsEnsemble::field(const SpectralData& s, int i) const {
  const Eigen::VectorXd real = s.eigenvectors * samples.at(static_cast<std::size_t>(i));
  return s.basis.to_field(gaussian::field_grid(s), s.basis.from_real(real));
}

GibbsEnsemble sample_gibbs(const SpectralData& s, const Mollifier& m, int N, int n_samples,
                           std::uint64_t seed_base, const GibbsOptions& opts) {
  if (n_samples < 100) throw std::invalid_argument("sample_gibbs: n_samples must be at least 100");
  if (opts.thin < 1) throw std::invalid_argument("sample_gibbs: thin must be positive");
  const QuarticPotential pot(s, m, N, opts.reference);
  const long total = opts.mode == SamplerMode::metropolis ? static_cast<long>(n_samples) * opts.thin : n_samples;
  const auto V = proposal_potentials(s, pot, opts.variant, total, seed_base, opts.disable_interaction);

  GibbsEnsemble e;
  e.mode = opts.mode;
  e.seed_base = seed_base;
  e.proposals = total;
  e.effective_sample_size = effective_size(V);
  if (e.effective_sample_size < 0.05 * static_cast<double>(total)) {
    throw DegenerateWeights("sample_gibbs: effective sample size " + std::to_string(e.effective_sample_size) +
                            " below 5% of " + std::to_string(total));
  }

  std::vector<long> picked;
  std::vector<bool> step_accepted;
  if (opts.mode == SamplerMode::importance) {
    for (long i = 0; i < total; ++i) {
      picked.push_back(i);
      step_accepted.push_back(true);
    }
  } else {
    spectral::GaussianStream rng(seed_base, kChainStream);
    long current = 0;
    long moves = 0;
    bool last = true;
    for (long i = 0; i < total; ++i) {
      if (i > 0) {
        const double log_ratio = V[current] - V[i];
        last = log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
        if (last) {
          current = i;
          ++moves;
        }
      }
      if ((i + 1) % opts.thin == 0) {
        picked.push_back(current);
        step_accepted.push_back(last);
      }
    }
    e.acceptance_rate = total > 1 ? static_cast<double>(moves) / static_cast<double>(total - 1) : 1.0;
  }

  e.samples = util::parallel_map<Eigen::VectorXd>(picked.size(), [&](std::size_t k) {
    return gaussian::agff_coordinates(s, spectral::stream_key(seed_base, static_cast<std::uint64_t>(picked[k])));
  });
  for (std::size_t k = 0; k < picked.size(); ++k) {
    const double v = V[static_cast<std::size_t>(picked[k])];
    e.weights.push_back({-v, v, opts.variant});
  }
  e.accepted = std::move(step_accepted);
  return e;
}

PartitionEstimate partition_estimate(const SpectralData& s, const Mollifier& m, int N, int n_samples,
                                     std::uint64_t seed_base, Variant variant, bool disable_interaction) {
  if (n_samples < 100) throw std::invalid_argument("partition_estimate: n_samples must be at least 100");
  const QuarticPotential pot(s, m, N);
  const auto V = proposal_potentials(s, pot, variant, n_samples, seed_base, disable_interaction);
  util::MomentAccumulator acc;
  for (double v : V) acc.add(std::exp(-v));
  return {acc.mean(), acc.std_error(), n_samples};
}

void write_gibbs_csv(std::ostream& os, const GibbsEnsemble& e) {
  os << "sample_index,V,log_weight,accepted\n";
  os.precision(17);
  for (int i = 0; i < e.size(); ++i) {
    os << i << ',' << e.weights[i].interaction_V << ',' << e.weights[i].log_weight << ','
       << (e.accepted[i] ? 1 : 0) << '\n';
  }
}

void write_gibbs_ensemble(std::ostream& os, const GibbsEnsemble& e) {
  os.write(kMagic, 4);
  le::put_u32(os, kVersion);
  le::put_u32(os, static_cast<std::uint32_t>(e.size()));
  const auto dim = e.samples.empty() ? 0 : static_cast<std::uint32_t>(e.samples.front().size());
  le::put_u32(os, dim);
  le::put_u8(os, e.mode == SamplerMode::metropolis ? 0 : 1);
  for (int i = 0; i < 3; ++i) le::put_u8(os, 0);
  le::put_u64(os, e.seed_base);
  le::put_f64(os, e.effective_sample_size);
  le::put_f64(os, e.acceptance_rate);
  for (int i = 0; i < e.size(); ++i) {
    le::put_f64(os, e.weights[i].interaction_V);
    le::put_f64(os, e.weights[i].log_weight);
    le::put_u8(os, e.accepted[i] ? 1 : 0);
    for (Eigen::Index k = 0; k < e.samples[i].size(); ++k) le::put_f64(os, e.samples[i][k]);
  }
}

GibbsEnsemble read_gibbs_ensemble(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw std::runtime_error("gibbs container: bad magic");
  }
  if (le::get_u32(is) != kVersion) throw std::runtime_error("gibbs container: unsupported version");
  GibbsEnsemble e;
  const auto count = le::get_u32(is);
  const auto dim = le::get_u32(is);
  e.mode = le::get_u8(is) == 0 ? SamplerMode::metropolis : SamplerMode::importance;
  for (int i = 0; i < 3; ++i) (void)le::get_u8(is);
  e.seed_base = le::get_u64(is);
  e.effective_sample_size = le::get_f64(is);
  e.acceptance_rate = le::get_f64(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    GibbsWeight w;
    w.interaction_V = le::get_f64(is);
    w.log_weight = le::get_f64(is);
    e.weights.push_back(w);
    e.accepted.push_back(le::get_u8(is) != 0);
    Eigen::VectorXd u(dim);
    for (std::uint32_t k = 0; k < dim; ++k) u[k] = le::get_f64(is);
    e.samples.push_back(std::move(u));
  }
  e.proposals = count;
  return e;
}

void write_gibbs_ensemble_file(const std::filesystem::path& p, const GibbsEnsemble& e) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + p.string());
  write_gibbs_ensemble(os, e);
}

GibbsEnsemble read_gibbs_ensemble_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + p.string());
  return read_gibbs_ensemble(is);
}

}  // namespace anderson_lab::gibbs
