#include <doctest.h>

#include <cmath>

#include "anderson_lab/paracontrolled/paracontrolled.hpp"
#include "anderson_lab/paracontrolled/paraproducts.hpp"
#include "anderson_lab/spectral/littlewood_paley.hpp"
#include "anderson_lab/spectral/products.hpp"
#include "test_support.hpp"

using namespace anderson_lab::spectral;
using namespace anderson_lab::paracontrolled;
using alab_test::random_field;

namespace {

SpectralField complex_mode(const TorusGrid& g, Wavevector k) {
  SpectralField f(g, false);
  f.coeff(k) = 1.0;
  return f;
}

double radius(Wavevector k) { return std::sqrt(double(k.norm2())); }

// Brute-force block arithmetic for exponentials e_a, e_b.
double less_weight(Wavevector a, Wavevector b) {
  double w = 0.0;
  for (int j = -1; j <= 8; ++j) {
    for (int i = -1; i <= j - 2; ++i) w += lp_symbol(i, radius(a)) * lp_symbol(j, radius(b));
  }
  return w;
}

double resonant_weight(Wavevector a, Wavevector b) {
  double w = 0.0;
  for (int j = -1; j <= 8; ++j) {
    for (int i = -1; i <= 8; ++i) {
      if (std::abs(i - j) <= 1) w += lp_symbol(i, radius(a)) * lp_symbol(j, radius(b));
    }
  }
  return w;
}

double relative_l2(const SpectralField& a, const SpectralField& b) {
  return (a - b).l2_norm() / b.l2_norm();
}

EnhancedNoise noise_at(int n, double eps, std::uint64_t seed) {
  const TorusGrid g(n);
  return build_enhanced(sample_white_noise(g, seed), Mollifier(eps), seed);
}

}  // namespace

TEST_CASE("paraproducts of constants") {
  const TorusGrid g(32);
  const auto c = SpectralField::constant(g, 1.5);
  const auto f = random_field(g, 1, 0.5);
  const auto expected_less = 1.5 * (f - lp_block(f, -1) - lp_block(f, 0));
  CHECK(max_coeff_distance(para_less(c, f), expected_less) < 1e-13);
  CHECK(para_less(f, c).l2_norm() < 1e-14);
  const auto expected_res = 1.5 * (lp_block(f, -1) + lp_block(f, 0));
  CHECK(max_coeff_distance(resonant(c, f), expected_res) < 1e-13);
}

TEST_CASE("product splits exactly into three paraproduct pieces (100 pairs)") {
  const TorusGrid g(32);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = random_field(g, 2 * s, 0.3);
    const auto h = random_field(g, 2 * s + 1, 0.3);
    const auto split = split_product(f, h);
    const auto sum = split.less + split.res + split.greater;
    worst = std::max(worst, max_coeff_distance(sum, product(f, h)));
    if (s < 5) {
      CHECK(max_coeff_distance(split.less, para_less(f, h)) < 1e-14);
      CHECK(max_coeff_distance(split.greater, para_greater(f, h)) < 1e-14);
      CHECK(max_coeff_distance(resonant(f, h), resonant(h, f)) < 1e-12);
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("single-mode paraproducts match block enumeration") {
  const TorusGrid g(32);
  const Wavevector cases[][2] = {{{1, 0}, {6, 2}}, {{2, 1}, {3, 0}}, {{0, 3}, {5, -5}}, {{7, 1}, {-1, 2}}};
  for (const auto& c : cases) {
    const auto a = c[0];
    const auto b = c[1];
    const auto pl = para_less(complex_mode(g, a), complex_mode(g, b));
    const auto rs = resonant(complex_mode(g, a), complex_mode(g, b));
    CHECK(std::abs(pl.coeff(a + b) - less_weight(a, b)) < 1e-13);
    CHECK(std::abs(rs.coeff(a + b) - resonant_weight(a, b)) < 1e-13);
  }
  // Well separated annuli
  const auto r = resonant(complex_mode(g, {1, 0}), complex_mode(g, {12, 0}));
  CHECK(r.l2_norm() == 0.0);
}

TEST_CASE("commutator: zero input and single-mode block enumeration") {
  const TorusGrid g(32);
  const auto f = random_field(g, 3);
  CHECK(commutator(f, SpectralField(g), f).l2_norm() == 0.0);

  const Wavevector triples[][3] = {{{1, 0}, {4, 1}, {-3, 0}}, {{0, 1}, {2, 3}, {-2, -2}}, {{2, 2}, {5, 0}, {-6, 1}}};
  for (const auto& t : triples) {
    const auto a = t[0], b = t[1], c = t[2];
    const auto value = commutator(complex_mode(g, a), complex_mode(g, b), complex_mode(g, c));
    const double expected =
        less_weight(a, b) * resonant_weight(a + b, c) - resonant_weight(b, c);
    CHECK(std::abs(value.coeff(a + b + c) - expected) < 1e-13);
    CHECK(std::abs(value.l2_norm() - std::abs(expected)) < 1e-13);
  }
}

TEST_CASE("commutator bound is resolution stable") {
  const double alpha = 0.4, beta = -0.1, gamma = -0.2;
  auto ratio = [&](int n) {
    const TorusGrid g(n);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto f = random_field(g, 10 + s, 1.0 + alpha + 0.1);
      const auto gg = random_field(g, 20 + s, 1.0 + beta + 0.1);
      const auto h = random_field(g, 30 + s, 1.0 + gamma + 0.1);
      const double num = sobolev_norm(commutator(f, gg, h), alpha + beta + gamma - 0.05);
      const double den = sobolev_norm(f, alpha) * besov_norm(gg, beta, Exponent::infinity, Exponent::infinity) *
                         besov_norm(h, gamma, Exponent::infinity, Exponent::infinity);
      worst = std::max(worst, num / den);
    }
    return worst;
  };
  const double r32 = ratio(32), r64 = ratio(64), r128 = ratio(128);
  MESSAGE("commutator constants " << r32 << " " << r64 << " " << r128);
  CHECK(r64 / r32 < 2.0);
  CHECK(r128 / r64 < 2.0);
}

TEST_CASE("paraproduct bound is resolution stable") {
  for (double a2 : {-0.5, 0.3}) {
    auto ratio = [&](int n) {
      const TorusGrid g(n);
      double worst = 0.0;
      for (std::uint64_t s = 0; s < 4; ++s) {
        const auto f = random_field(g, 40 + s, 1.5);
        const auto h = random_field(g, 50 + s, 1.0 + a2 + 0.1);
        worst = std::max(worst, sobolev_norm(para_less(f, h), a2) / (f.max_norm() * sobolev_norm(h, a2)));
      }
      return worst;
    };
    const double r32 = ratio(32), r64 = ratio(64), r128 = ratio(128);
    CHECK(r64 / r32 < 2.0);
    CHECK(r128 / r64 < 2.0);
    CHECK(r128 < 10.0);
  }
}

TEST_CASE("grid mismatch is rejected") {
  CHECK_THROWS_AS((void)para_less(SpectralField(TorusGrid(8)), SpectralField(TorusGrid(16))), GridMismatch);
}

TEST_CASE("gamma and phi with zero noise are the identity") {
  const TorusGrid g(32);
  const auto noise = build_enhanced(SpectralField(g), Mollifier(0.2));
  const auto v = random_field(g, 4, 1.5);
  // Xi^2 is the constant -c here and u < const vanishes.
  const auto u = gamma_map(v, noise, kNoCutoff);
  CHECK(max_coeff_distance(u.u, v) == 0.0);
  CHECK(u.iterations == 1);

  EnhancedNoise silent = noise;
  silent.xi2_eps = SpectralField(g);
  silent.c_eps = 0.0;
  const auto id = gamma_map(v, silent, kNoCutoff);
  CHECK(max_coeff_distance(id.u, v) == 0.0);
  CHECK(max_coeff_distance(phi_map(v, silent, kNoCutoff), v) == 0.0);
}

TEST_CASE("gamma and phi are mutually inverse") {
  const auto noise = noise_at(64, 0.2, 7);
  const int N = default_cutoff(noise);
  MESSAGE("default cutoff " << N);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto v = random_field(noise.grid(), 60 + s, 1.0);
    const auto u = gamma_map(v, noise, N);
    CHECK(u.residual < 1e-10 * v.l2_norm());
    CHECK((phi_map(u, noise) - v).l2_norm() < 1e-9 * v.l2_norm());
    const auto back = gamma_map(phi_map(v, noise, N), noise, N);
    CHECK((back.u - v).l2_norm() < 1e-9 * v.l2_norm());
  }
}

TEST_CASE("contraction factor decreases with the cutoff") {
  const auto noise = noise_at(64, 0.2, 8);
  double previous = INFINITY;
  for (int N = kNoCutoff; N <= 4; ++N) {
    const double f = contraction_factor(noise, N);
    MESSAGE("N=" << N << " factor " << f);
    CHECK(f <= previous * 1.05);
    previous = f;
  }
  CHECK(contraction_factor(noise, default_cutoff(noise)) < 0.5);
}

TEST_CASE("no contraction is reported") {
  const auto noise = noise_at(64, 0.05, 9);
  EnhancedNoise loud = noise;
  loud.xi_eps *= 50.0;
  CHECK_THROWS_AS((void)gamma_map(random_field(noise.grid(), 1), loud, kNoCutoff), NoContraction);
}

TEST_CASE("gamma is Lipschitz with a resolution-stable constant") {
  for (double s : {0.0, 0.5}) {
    auto constant = [&](int n) {
      const auto noise = noise_at(n, 0.2, 12);
      const int N = default_cutoff(noise);
      double worst = 0.0;
      for (std::uint64_t k = 0; k < 3; ++k) {
        const auto v = random_field(noise.grid(), 70 + k, 1.5);
        worst = std::max(worst, sobolev_norm(gamma_map(v, noise, N).u, s) / sobolev_norm(v, s));
      }
      return worst;
    };
    const double c32 = constant(32), c64 = constant(64);
    MESSAGE("Lipschitz s=" << s << ": " << c32 << " " << c64);
    CHECK(c64 / c32 < 2.0);
    CHECK(c32 / c64 < 2.0);
  }
}

TEST_CASE("paracontrolled Hamiltonian") {
  const auto noise = noise_at(64, 0.2, 21);
  const TorusGrid& g = noise.grid();

  SUBCASE("zero noise acts as 1 - Delta") {
    EnhancedNoise silent = noise;
    silent.xi_eps = SpectralField(g);
    silent.xi2_eps = SpectralField(g);
    silent.c_eps = 0.0;
    const auto u = random_field(g, 5, 2.0);
    const auto h = apply_paracontrolled_hamiltonian(make_paracontrolled(u, silent), silent);
    CHECK(relative_l2(h, bessel_potential(u, 1.0)) < 1e-13);
  }

  SUBCASE("matches direct evaluation without truncation") {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto u = random_field(g, 100 + s, 1.5);
      const auto pc = make_paracontrolled(u, noise, kNoCutoff);
      worst = std::max(worst, relative_l2(apply_paracontrolled_hamiltonian(pc, noise), direct_hamiltonian(u, noise)));
    }
    CHECK(worst < 1e-8);
  }

  SUBCASE("matches direct evaluation with an active cutoff") {
    for (int N : {1, 3}) {
      const auto v = random_field(g, 200 + N, 1.5);
      const auto pc = gamma_map(v, noise, std::max(N, default_cutoff(noise)));
      CHECK(relative_l2(apply_paracontrolled_hamiltonian(pc, noise), direct_hamiltonian(pc.u, noise)) < 1e-8);
    }
  }

  SUBCASE("linear in u") {
    const auto a = random_field(g, 300, 1.5);
    const auto b = random_field(g, 301, 1.5);
    const auto ha = apply_paracontrolled_hamiltonian(make_paracontrolled(a, noise), noise);
    const auto hb = apply_paracontrolled_hamiltonian(make_paracontrolled(b, noise), noise);
    const auto hab = apply_paracontrolled_hamiltonian(make_paracontrolled(2.0 * a + b, noise), noise);
    CHECK(relative_l2(hab, 2.0 * ha + hb) < 1e-12);
  }
}
