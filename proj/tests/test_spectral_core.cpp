#include <doctest.h>

#include <cmath>
#include <sstream>

#include "anderson_lab/spectral/field_io.hpp"
#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/mollifier.hpp"
#include "anderson_lab/spectral/noise.hpp"
#include "anderson_lab/spectral/products.hpp"
#include "test_support.hpp"

using namespace anderson_lab::spectral;
using alab_test::MeanAccumulator;
using alab_test::random_field;
using alab_test::single_mode;

TEST_CASE("grid rejects odd or tiny sizes and indexes wavevectors consistently") {
  CHECK_THROWS_AS(TorusGrid(3), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid(7), std::invalid_argument);
  const TorusGrid g(8);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index(g.wavevector(i)) == i);
  CHECK(g.is_nyquist({4, 0}));
  CHECK(g.is_nyquist({0, -4}));
  CHECK_FALSE(g.is_nyquist({3, -3}));
  CHECK(half_plane_modes(g).size() == (7 * 7 - 1) / 2);
}

TEST_CASE("transforms round trip and satisfy Parseval") {
  const TorusGrid g(32);
  const auto f = random_field(g, 1, 0.5);
  const auto values = f.values();
  const auto back = SpectralField::from_values(g, values);
  CHECK(max_coeff_distance(f, back) < 1e-12);

  double sum = 0.0;
  for (double v : values) sum += v * v;
  CHECK(std::sqrt(sum / values.size()) == doctest::Approx(f.l2_norm()).epsilon(1e-12));

  // inverse(forward(values)) back in physical space
  const auto again = back.values();
  double err = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) err = std::max(err, std::abs(values[i] - again[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("white noise is deterministic and Hermitian with Nyquist zeroed") {
  const TorusGrid g(16);
  const auto a = sample_white_noise(g, 42);
  const auto b = sample_white_noise(g, 42);
  CHECK(max_coeff_distance(a, b) == 0.0);
  CHECK(a.hermitian_defect() == 0.0);
  CHECK(a.coeff({8, 3}) == Complex(0.0));
  CHECK(a.coeff({0, 0}).imag() == 0.0);
  const auto c = sample_white_noise(g, 43);
  CHECK(max_coeff_distance(a, c) > 0.0);
}

TEST_CASE("white noise second moments over 1e5 seeds") {
  const TorusGrid g(4);
  const Wavevector k{1, 0};
  const Wavevector l{0, 1};
  MeanAccumulator power, cross, zero_mode;
  for (std::uint64_t s = 0; s < 100000; ++s) {
    const auto xi = sample_white_noise(g, s);
    power.add(std::norm(xi.coeff(k)));
    cross.add((xi.coeff(k) * std::conj(xi.coeff(l))).real());
    zero_mode.add(std::norm(xi.coeff({0, 0})));
  }
  CHECK(std::abs(power.mean() - 1.0) < 0.02);
  CHECK(std::abs(zero_mode.mean() - 1.0) < 0.02);
  CHECK(std::abs(cross.mean()) < 3.0 * cross.std_error());
}

TEST_CASE("mollifier multiplier algebra") {
  const TorusGrid g(32);
  const auto f = random_field(g, 3);
  CHECK(max_coeff_distance(mollify(f, Mollifier::identity()), f) == 0.0);

  const auto c = SpectralField::constant(g, 2.5);
  CHECK(max_coeff_distance(mollify(c, Mollifier(0.3)), c) == 0.0);

  const Mollifier m(0.2);
  const auto twice = mollify(mollify(f, m), m);
  const auto sq = f.multiplied([&](Wavevector k) { return m(k) * m(k); });
  CHECK(max_coeff_distance(twice, sq) < 1e-15);
  CHECK(max_coeff_distance(twice, mollify(f, m.squared())) < 1e-14);

  const Mollifier sharp(0.25, MollifierKind::sharp_cutoff);
  CHECK(sharp({4, 0}) == 1.0);
  CHECK(sharp({4, 1}) == 0.0);
  CHECK(Mollifier(0.2)({3, 4}) == doctest::Approx(std::exp(-0.5 * 0.04 * 25)));
}

namespace {

// Independent oracle: group lattice points by |k|^2 using a representation count.
double shell_sum_oracle(double eps, int half_width) {
  double acc = 0.0;
  const int max_r2 = 2 * half_width * half_width;
  for (int r2 = 0; r2 <= max_r2; ++r2) {
    long count = 0;
    for (int a = -half_width; a <= half_width; ++a) {
      const int rest = r2 - a * a;
      if (rest < 0) continue;
      const int b = static_cast<int>(std::lround(std::sqrt(double(rest))));
      if (b * b != rest || b > half_width) continue;
      count += b == 0 ? 1 : 2;
    }
    acc += count * std::exp(-eps * eps * r2) / (r2 + 1.0);
  }
  return acc;
}

}  // namespace

TEST_CASE("renormalization constant") {
  const TorusGrid g(64);
  CHECK(renorm_constant(Mollifier(INFINITY), g).value == doctest::Approx(1.0));

  const double a = renorm_constant(Mollifier(0.2), g).value;
  const double b = renorm_constant(Mollifier(0.4), g).value;
  CHECK(a > b);

  const TorusGrid big(256);
  const auto r = renorm_constant(Mollifier(0.05), big);
  CHECK(r.value == doctest::Approx(shell_sum_oracle(0.05, 127)).epsilon(1e-12));
  CHECK(r.tail_bound < 1e-12 * r.value);
  CHECK_FALSE(r.tail_warning);

  // Logarithmic growth: each halving adds a roughly constant amount.
  const TorusGrid huge(1024);
  std::vector<double> vals;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) vals.push_back(renorm_constant(Mollifier(eps), huge).value);
  std::vector<double> diffs;
  for (std::size_t i = 1; i < vals.size(); ++i) diffs.push_back(vals[i] - vals[i - 1]);
  for (double d : diffs) CHECK(d > 0.0);
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    CHECK(diffs[i] / diffs[i - 1] > 0.8);
    CHECK(diffs[i] / diffs[i - 1] < 1.25);
  }
  // Identity mollifier on a finite grid leaves an unbounded tail.
  CHECK(renorm_constant(Mollifier::identity(), g).tail_warning);
}

TEST_CASE("enhanced noise") {
  const TorusGrid g(32);
  const Mollifier m(0.2);
  const auto zero = build_enhanced(SpectralField(g), m);
  const double c = renorm_constant(m, g).value;
  CHECK(zero.c_eps == doctest::Approx(c));
  auto expected = SpectralField::constant(g, -c);
  CHECK(max_coeff_distance(zero.xi2_eps, expected) < 1e-12);

  const auto xi = sample_white_noise(g, 5);
  const auto en = build_enhanced(xi, m, 5);
  CHECK(max_coeff_distance(en.xi_eps, mollify(xi, m)) == 0.0);
  CHECK(en.xi2_eps.hermitian_defect() < 1e-13);
}

TEST_CASE("renormalized resonant square has mean zero at a point (1e4 seeds)") {
  const TorusGrid g(16);
  const Mollifier m(0.3);
  MeanAccumulator acc;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto en = build_enhanced(sample_white_noise(g, 1000 + s), m);
    acc.add(en.xi2_eps.values()[0]);
  }
  CHECK(std::abs(acc.mean()) < 3.0 * acc.std_error());
}

TEST_CASE("resonant square Besov norm is stable as eps halves") {
  const TorusGrid g(128);
  const auto xi = sample_white_noise(g, 11);
  const double a = besov_norm(build_enhanced(xi, Mollifier(0.2)).xi2_eps, -0.1, Exponent::infinity,
                              Exponent::infinity);
  const double b = besov_norm(build_enhanced(xi, Mollifier(0.1)).xi2_eps, -0.1, Exponent::infinity,
                              Exponent::infinity);
  CHECK(b / a < 2.0);
  CHECK(a / b < 2.0);
}

TEST_CASE("Littlewood-Paley blocks") {
  const TorusGrid g(64);
  const auto c = SpectralField::constant(g, 1.7);
  CHECK(max_coeff_distance(lp_block(c, -1), c) == 0.0);
  for (int j = 0; j <= max_block(g); ++j) CHECK(lp_block(c, j).l2_norm() == 0.0);

  for (int j = 2; j <= 4; ++j) {
    const auto f = single_mode(g, {1 << j, 0});
    CHECK(lp_block(f, j).l2_norm() > 0.0);
    CHECK(lp_block(f, j - 2).l2_norm() == 0.0);
    CHECK(lp_block(f, j + 2).l2_norm() == 0.0);
  }

  const auto f = random_field(g, 9, 0.0);
  SpectralField sum(g);
  for (int j = -1; j <= max_block(g); ++j) sum += lp_block(f, j);
  CHECK(max_coeff_distance(sum, f) < 1e-12);
  CHECK_THROWS_AS((void)lp_block(f, -2), std::invalid_argument);
  CHECK(lp_block(f, max_block(g) + 1).l2_norm() == 0.0);

  // Blocks two apart never overlap.
  for (double r = 0.0; r < 64.0; r += 0.01) {
    for (int j = -1; j <= 5; ++j) CHECK(lp_symbol(j, r) * lp_symbol(j + 2, r) == 0.0);
  }
}

TEST_CASE("Besov norms") {
  const TorusGrid g(64);
  CHECK(besov_norm(SpectralField(g), 0.5, Exponent::two, Exponent::two) == 0.0);

  // |k| = 11 lies where block 3 is identically one.
  const int j = 3;
  const auto f = single_mode(g, {11, 0});
  for (double s : {-0.7, 0.0, 1.3}) {
    for (auto p : {Exponent::two, Exponent::infinity}) {
      const double ratio = besov_norm(f, s, p, Exponent::infinity) / std::pow(2.0, j * s);
      CHECK(ratio >= 1.0 - 1e-12);
      CHECK(ratio <= 2.0 + 1e-12);
    }
  }

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_field(g, 100 + seed, 1.0);
    for (double s : {-0.5, 0.0, 0.7}) {
      const double ratio = besov_norm(r, s, Exponent::two, Exponent::two) / sobolev_norm(r, s);
      CHECK(ratio > 0.25);
      CHECK(ratio < 4.0);
    }
  }
}

TEST_CASE("dealiased product is exact for band-limited fields") {
  const TorusGrid g(16);
  const auto a = single_mode(g, {3, 1});
  const auto b = single_mode(g, {2, -2});
  const auto p = product(a, b);
  // (e_k + e_-k)(e_l + e_-l) = e_{k+l} + e_{k-l} + conj pairs
  CHECK(std::abs(p.coeff({5, -1}) - 1.0) < 1e-14);
  CHECK(std::abs(p.coeff({1, 3}) - 1.0) < 1e-14);
  CHECK(std::abs(p.coeff({0, 0})) < 1e-14);
}

TEST_CASE("binary and CSV field export") {
  const TorusGrid g(8);
  auto f = random_field(g, 4);
  f.set_role(FieldRole::gff);
  std::stringstream ss;
  write_field(ss, f);
  CHECK(ss.str().size() == 4 + 4 + 4 + 1 + 1 + 2 + 8 + 8 * g.size());
  CHECK(ss.str().substr(0, 4) == "ALFD");
  const auto back = read_field(ss);
  CHECK(back.role() == FieldRole::gff);
  CHECK(back.is_real());
  CHECK(max_coeff_distance(back, f) < 1e-6);

  std::stringstream bad("XXXX");
  CHECK_THROWS((void)read_field(bad));

  std::ostringstream csv;
  write_field_csv(csv, f);
  CHECK(csv.str().rfind("k1,k2,re,im\n", 0) == 0);
}
