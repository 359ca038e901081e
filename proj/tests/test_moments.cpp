#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "qslimit/moments.hpp"
#include "qslimit/tables.hpp"

using namespace qslimit;

TEST_CASE("toll endpoints, symmetry and midpoint") {
  CHECK(toll(0.0) == 1.0);
  CHECK(toll(1.0) == 1.0);
  CHECK(toll(0.5) == doctest::Approx(1 - 2 * std::numbers::ln2).epsilon(1e-15));
  CHECK(toll(0.5) == doctest::Approx(-0.38629436111989).epsilon(1e-13));
  for (double u : {0.01, 0.1, 0.3, 0.45}) CHECK(toll(u) == doctest::Approx(toll(1 - u)).epsilon(1e-14));
  CHECK(toll(1e-300) == doctest::Approx(1.0));
  CHECK_THROWS_AS(toll(-0.1), std::domain_error);
  CHECK_THROWS_AS(toll(1.5), std::domain_error);
  CHECK_THROWS_AS(toll(std::nan("")), std::domain_error);
}

TEST_CASE("I(a, b, 0) is the Beta function") {
  for (unsigned a = 0; a <= 8; ++a) {
    for (unsigned b = 0; a + b <= 8; ++b) {
      const Approx v = mixed_integral(a, b, 0);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(v.value - boost::math::beta(a + 1.0, b + 1.0)) <= 1e-12);
    }
  }
}

TEST_CASE("mixed integral reference values") {
  // toll has mean zero; the second value is a 30-digit evaluation.
  CHECK(std::abs(mixed_integral(0, 0, 1).value) <= 1e-12);
  CHECK(mixed_integral(0, 0, 2).value == doctest::Approx(0.14008791086903142).epsilon(1e-12));
  CHECK(mixed_integral(0, 0, 2).error <= kQuadratureTolerance);
  CHECK(mixed_integral(2, 1, 1).value == doctest::Approx(mixed_integral(1, 2, 1).value).epsilon(1e-12));
  CHECK_THROWS_AS(mixed_integral(5, 4, 0), std::domain_error);
  CHECK_NOTHROW(mixed_integral(5, 4, 0, 9));
}

TEST_CASE("moments of the limit law") {
  const double m2 = 7 - 2 * std::numbers::pi * std::numbers::pi / 3;
  CHECK(moment(0).value == 1.0);
  CHECK(moment(1).value == 0.0);
  CHECK(std::abs(moment(2).value - m2) <= 1e-6);
  CHECK(moment(2).error <= 1e-6);
  // 30-digit reference evaluations of the same recursion.
  CHECK(moment(3).value == doctest::Approx(0.2329104505535085664).epsilon(1e-8));
  CHECK(std::abs(moment(4).value - 0.7379) <= 1e-3);
  CHECK(moment(4).value == doctest::Approx(0.73794548967638638).epsilon(1e-8));
  CHECK(moment(4).value < 1.0);
  CHECK(moment(4).value >= moment(2).value * moment(2).value);
  CHECK(moment(6).value == doctest::Approx(3.2977177947000134).epsilon(1e-7));
  CHECK(moment(5).value == doctest::Approx(1.2189837328659088).epsilon(1e-7));
  CHECK(std::isfinite(moment(kDefaultMaxOrder + 1).value));
}

TEST_CASE("MomentTable of a custom order") {
  const MomentTable t(3);
  CHECK(t.max_order() == 3);
  CHECK(t.all().size() == 4);
  CHECK(t[2].value == doctest::Approx(moment(2).value).epsilon(1e-14));
}

TEST_CASE("finite-n variance approaches m_2 from below") {
  const auto tables = build_tables(60);
  const double v60 = Rational(tables[60].variance() / Rational(3600)).get_d();
  CHECK(v60 < moment(2).value);
  CHECK(moment(2).value - v60 < 0.15);
}
