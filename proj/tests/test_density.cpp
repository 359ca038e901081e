#include <doctest.h>

#include <cmath>

#include "qslimit/density.hpp"

using namespace qslimit;

namespace {

Rational q(long num, unsigned long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

const std::vector<CountTable>& tables_to_60() {
  static const std::vector<CountTable> tables = build_tables(60);
  return tables;
}

double f(std::uint64_t n, const Rational& x) {
  return fn_eval(tables_to_60()[n], ConstantSet::paper(), x).value().mid();
}

}  // namespace

TEST_CASE("published constants") {
  const auto p = ConstantSet::paper();
  CHECK(p.K == 16);
  CHECK(p.Ktilde == 2466);
  CHECK(p.c == 589);
  CHECK(p.proven());
  CHECK(to_string(p.provenance) == "paper");
  CHECK(p.chat().approx() == doctest::Approx(201.17916749050588).epsilon(1e-14));
  CHECK_THROWS_AS(ConstantSet::custom(Rational(0), Rational(1), Rational(1)), DomainError);
  CHECK_FALSE(ConstantSet::custom(Rational(1), Rational(1), Rational(1)).proven());
}

TEST_CASE("delta_n and R_n at reference levels") {
  const auto p = ConstantSet::paper();
  // 40-digit reference evaluations.
  CHECK(delta_n(p, 1).mid() == doctest::Approx(0.40393358592898).epsilon(1e-13));
  CHECK(delta_n(p, 3).mid() == doctest::Approx(0.33634870189317).epsilon(1e-13));
  CHECK(delta_n(p, 64).mid() == doctest::Approx(0.20196679296449).epsilon(1e-13));
  CHECK(delta_n(p, 100).reciprocal().mid() == doctest::Approx(5.3336359369004).epsilon(1e-13));
  CHECK(remainder_bound(p, 1).contains(parse_rational("996.1002229008760866030017848927656138433")));
  CHECK(remainder_bound(p, 100).mid() == doctest::Approx(462.34876717759065).epsilon(1e-14));
  CHECK(remainder_radical(p, 1).radicand() == Rational(976828278613966848));
  CHECK_THROWS_AS(delta_n(p, 0), DomainError);
  CHECK_THROWS_AS(remainder_bound(p, 0), DomainError);
}

TEST_CASE("R_64 is exactly half of R_1") {
  const auto p = ConstantSet::paper();
  CHECK(Rational(remainder_radical(p, 1).radicand() / remainder_radical(p, 64).radicand()) == 64);
  CHECK(Rational(delta_radical(p, 1).radicand() / delta_radical(p, 64).radicand()) == 64);
}

TEST_CASE("delta_n and R_n decrease strictly") {
  const auto p = ConstantSet::paper();
  for (std::uint64_t n = 1; n < 200; ++n) {
    CHECK(delta_n(p, n + 1).hi_exact() < delta_n(p, n).lo_exact());
    CHECK(remainder_bound(p, n + 1).hi_exact() < remainder_bound(p, n).lo_exact());
  }
}

TEST_CASE("first level where R_n drops below a threshold") {
  const auto p = ConstantSet::paper();
  CHECK(first_level_below(p, Rational(16)) == BigCount("58223502554"));
  const BigCount n = first_level_below(p, Rational(16));
  CHECK(remainder_radical(p, n.get_ui()).compare(Rational(16)) == std::strong_ordering::less);
  CHECK(remainder_radical(p, n.get_ui() - 1).compare(Rational(16)) == std::strong_ordering::greater);
  CHECK(first_level_below(p, Rational(1000)) == 1);
}

TEST_CASE("fn_eval reference points") {
  const auto& t = tables_to_60();
  const auto p = ConstantSet::paper();
  const DensityEstimate far = fn_eval(t[3], p, Rational(10));
  CHECK(far.window_mass == 0);
  CHECK(far.value().hi() == 0.0);
  // Window around X_3 = -2/9 holds only i = 2: mass 2/3! = 1/3.
  const DensityEstimate at = fn_eval(t[3], p, q(-2, 9));
  CHECK(at.window_mass == q(1, 3));
  CHECK(at.first_index == 2);
  CHECK(at.last_index == 2);
  CHECK(at.value().mid() == doctest::Approx(0.99103499272373).epsilon(1e-12));
  CHECK(at.level == 3);
}

TEST_CASE("f_n integrates to one") {
  const auto& t = tables_to_60();
  const auto p = ConstantSet::paper();
  for (std::uint64_t n : {10u, 30u, 60u}) {
    // f_n is a box average, so a midpoint sum over [-4, 4] is nearly exact.
    double sum = 0.0;
    constexpr long steps = 8000;
    for (long j = 0; j < steps; ++j) sum += fn_eval(t[n], p, q(2 * j + 1 - steps, steps / 4)).value().mid();
    CHECK(sum * 8.0 / steps == doctest::Approx(1.0).epsilon(5e-3));
  }
}

TEST_CASE("f_n never exceeds 1/delta_n") {
  const auto& t = tables_to_60();
  const auto p = ConstantSet::paper();
  for (std::uint64_t n = 1; n <= 60; ++n) {
    const double cap = delta_n(p, n).reciprocal().hi();
    for (long j = -40; j <= 40; ++j) {
      const auto e = fn_eval(t[n], p, q(j, 20));
      REQUIRE(e.window_mass <= 1);
      REQUIRE(e.value().lo() <= cap);
    }
  }
}

TEST_CASE("consistency: |f_n - f_m| <= R_n + R_m") {
  const auto p = ConstantSet::paper();
  for (std::uint64_t n = 1; n <= 60; n += 7) {
    for (std::uint64_t m = n + 1; m <= 60; m += 11) {
      const double slack = remainder_bound(p, n).lo() + remainder_bound(p, m).lo();
      for (long j = -16; j <= 16; ++j) REQUIRE(std::abs(f(n, q(j, 8)) - f(m, q(j, 8))) <= slack);
    }
  }
}

TEST_CASE("f_n at n = 60 resembles a unimodal density near zero") {
  CHECK(f(60, Rational(0)) > f(60, Rational(1)));
  CHECK(f(60, Rational(0)) > f(60, Rational(-1)));
  CHECK(f(60, Rational(30)) == 0.0);
}

TEST_CASE("fn_bracket agrees with fn_eval on rational points") {
  const auto& t = tables_to_60();
  const auto p = ConstantSet::paper();
  const Radical one(Rational(1), 1);
  for (std::uint64_t n : {3u, 17u, 60u}) {
    for (long j = -30; j <= 30; ++j) {
      const Rational x = q(j, 13);
      const DensityBracket b = fn_bracket(t[n], p, ScaledRadical{one, x});
      REQUIRE(b.resolved());
      REQUIRE(b.mass_lo == fn_eval(t[n], p, x).window_mass);
    }
  }
}

TEST_CASE("fn_bracket on irrational points brackets nearby rational evaluations") {
  const auto& t = tables_to_60();
  const auto p = ConstantSet::paper();
  const Radical sqrt2(Rational(2), 2);
  for (long j = -20; j <= 20; ++j) {
    const ScaledRadical x{sqrt2, q(j, 17)};
    const DensityBracket b = fn_bracket(t[40], p, x, 256);
    REQUIRE(b.resolved());
    const Enclosure e = x.enclose(256);
    const Rational lo = fn_eval(t[40], p, e.lo_exact()).window_mass;
    const Rational hi = fn_eval(t[40], p, e.hi_exact()).window_mass;
    if (lo == hi) REQUIRE(b.mass_lo == lo);
  }
  // A coarse enclosure may leave the bracket open but it must still contain the truth.
  const ScaledRadical x{sqrt2, q(1, 3)};
  const DensityBracket coarse = fn_bracket(t[60], p, x, 8);
  const DensityBracket fine = fn_bracket(t[60], p, x, 512);
  CHECK(coarse.mass_lo <= fine.mass_lo);
  CHECK(fine.mass_hi <= coarse.mass_hi);
}
