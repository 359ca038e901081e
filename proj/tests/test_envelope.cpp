#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qslimit/envelope.hpp"

using namespace qslimit;

namespace {

Rational q(long num, unsigned long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

const EnvelopeSpec& paper_envelope() {
  static const EnvelopeSpec spec = EnvelopeSpec::from_constants(ConstantSet::paper());
  return spec;
}

double ks_statistic(std::vector<double> xs, const EnvelopeSpec& spec) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double F = envelope_cdf(spec, xs[j]).mid();
    d = std::max({d, std::abs(F - j / n), std::abs((j + 1) / n - F)});
  }
  return d;
}

}  // namespace

TEST_CASE("envelope values at reference points") {
  const auto& g = paper_envelope();
  CHECK(g.tail_coefficient_sq() == 4932);
  CHECK(envelope_density(g, Rational(0)).mid() == 16.0);
  CHECK(g.crossover_approx() == doctest::Approx(2.0950566738205101).epsilon(1e-15));
  // g(a) = K on the nose: the crossover comparison is exact.
  CHECK(envelope_density_at_ratio(g, Rational(1)) == 16);
  CHECK(envelope_density_at_ratio(g, Rational(-2)) == 4);
  CHECK(envelope_density(g, Rational(10)).mid() == doctest::Approx(0.70228199464318).epsilon(1e-13));
  CHECK(envelope_density(g, Rational(-10)).mid() == doctest::Approx(0.70228199464318).epsilon(1e-13));
  CHECK(envelope_mass(g).mid() == doctest::Approx(134.08362712451265).epsilon(1e-14));
  CHECK(g.xi().mid() == doctest::Approx(0.0074580321359548).epsilon(1e-13));
}

TEST_CASE("envelope with K = 1, Ktilde = 1/2 has mass 4") {
  const EnvelopeSpec g = EnvelopeSpec::from_constants(ConstantSet::custom(Rational(1), q(1, 2), Rational(1)));
  CHECK(g.mass().exact() == Rational(4));
  CHECK(g.crossover().exact() == Rational(1));
  CHECK_THROWS_AS(EnvelopeSpec(Rational(0), Rational(1)), DomainError);
  CHECK_THROWS_AS(EnvelopeSpec(Rational(1), Rational(-1)), DomainError);
}

TEST_CASE("envelope mass agrees with numerical integration") {
  const auto& g = paper_envelope();
  // Midpoint rule on [-L, L] plus the closed-form tails 2 C / L.
  constexpr double L = 1000.0;
  constexpr int steps = 400000;
  const double h = 2 * L / steps;
  double sum = 0.0;
  for (int j = 0; j < steps; ++j) {
    const double x = -L + (j + 0.5) * h;
    sum += std::min(16.0, std::sqrt(4932.0) / (x * x));
  }
  const double total = sum * h + 2 * std::sqrt(4932.0) / L;
  CHECK(total == doctest::Approx(envelope_mass(g).mid()).epsilon(1e-4));
}

TEST_CASE("envelope cdf reference values and shape") {
  const auto& g = paper_envelope();
  CHECK(envelope_cdf(g, Rational(0)).contains(q(1, 2)));
  const double a = g.crossover_approx();
  CHECK(envelope_cdf(g, -a).mid() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(envelope_cdf(g, a).mid() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(envelope_cdf(g, 1e12).mid() == doctest::Approx(1.0));
  CHECK(envelope_cdf(g, -1e12).mid() == doctest::Approx(0.0));
  double previous = -1.0;
  for (long j = -4000; j <= 4000; ++j) {
    const double F = envelope_cdf(g, q(j, 100)).mid();
    REQUIRE(F >= previous);
    previous = F;
  }
}

TEST_CASE("envelope cdf derivative is xi g") {
  const auto& g = paper_envelope();
  const double xi = g.xi().mid();
  for (double x : {-30.0, -5.0, -1.0, 0.3, 1.9, 2.3, 7.0, 100.0}) {
    const double h = 1e-5;
    const double slope = (envelope_cdf(g, x + h).mid() - envelope_cdf(g, x - h).mid()) / (2 * h);
    CHECK(slope == doctest::Approx(xi * envelope_density(g, x).mid()).epsilon(1e-5));
  }
}

TEST_CASE("proposals with U1 = U2 land on the crossover") {
  const auto& g = paper_envelope();
  Proposal p;
  p.u1 = p.u2 = q(3, 8);
  p.ratio = p.u1 / p.u2;
  CHECK(p.point(g).approx() == doctest::Approx(g.crossover_approx()).epsilon(1e-15));
  CHECK(envelope_density_at_ratio(g, p.ratio) == g.K());
}

TEST_CASE("property: T = U g(X) is exact and below g") {
  const auto& g = paper_envelope();
  UniformStream rng(5);
  for (int j = 0; j < 2000; ++j) {
    const Proposal p = sample_proposal(rng);
    REQUIRE(sgn(p.u2) > 0);
    REQUIRE(p.ratio == (p.sign > 0 ? Rational(p.u1 / p.u2) : Rational(-p.u1 / p.u2)));
    const Rational gx = envelope_density_at_ratio(g, p.ratio);
    REQUIRE(gx <= g.K());
    if (std::abs(std::abs(p.ratio.get_d()) - 1.0) < 1e-9) continue;
    REQUIRE(envelope_density(g, p.point(g).approx()).mid() == doctest::Approx(gx.get_d()).epsilon(1e-12));
  }
}

TEST_CASE("envelope draws have median |x| = a and pass a KS test") {
  const auto& g = paper_envelope();
  UniformStream rng(20240915);
  std::vector<double> xs;
  for (int j = 0; j < 20000; ++j) xs.push_back(sample_envelope(g, rng));
  std::vector<double> ax(xs.size());
  std::transform(xs.begin(), xs.end(), ax.begin(), [](double v) { return std::abs(v); });
  std::nth_element(ax.begin(), ax.begin() + ax.size() / 2, ax.end());
  CHECK(ax[ax.size() / 2] == doctest::Approx(g.crossover_approx()).epsilon(0.05));
  // 1.95 / sqrt(n) is the 0.1% critical value.
  CHECK(ks_statistic(xs, g) < 1.95 / std::sqrt(20000.0));
}

TEST_CASE("same seed, same draws") {
  const auto& g = paper_envelope();
  UniformStream a(77), b(77);
  for (int j = 0; j < 100; ++j) REQUIRE(sample_envelope(g, a) == sample_envelope(g, b));
}

TEST_CASE("f_n stays below g + R_n") {
  const auto p = ConstantSet::paper();
  const auto& g = paper_envelope();
  const auto tables = build_tables(60);
  for (std::uint64_t n : {20u, 40u, 60u}) {
    const double R = remainder_bound(p, n).hi();
    for (long j = -80; j <= 80; ++j) {
      const Rational x = q(j, 8);
      REQUIRE(fn_eval(tables[n], p, x).value().lo() <= envelope_density(g, x).hi() + R);
    }
  }
}

TEST_CASE("lazy uniform refinement nests") {
  UniformStream a(9), b(9);
  LazyUniform u(a);
  CHECK(u.bits() == 53);
  CHECK(u.lower() == b.next_dyadic());
  Rational lo = u.lower(), hi = u.upper();
  for (int j = 0; j < 4; ++j) {
    u.refine(a);
    REQUIRE(lo <= u.lower());
    REQUIRE(u.upper() <= hi);
    REQUIRE(Rational(u.upper() - u.lower()) == Rational(hi - lo) / (BigCount(1) << 64));
    lo = u.lower();
    hi = u.upper();
  }
  CHECK(u.bits() == 53 + 4 * 64);
}
