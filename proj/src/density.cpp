#include "qslimit/density.hpp"

namespace qslimit {

namespace {

Rational sq(const Rational& q) { return q * q; }

Rational as_rational(std::uint64_t n) { return Rational(static_cast<unsigned long>(n)); }

void require_level(std::uint64_t n) {
  if (n == 0) throw DomainError("approximation level must be positive");
}

// Half window width in comparison-count units, n * delta_n / 2, whose sixth
// power n^6 delta_n^6 / 64 is rational.
Radical half_window(const ConstantSet& consts, std::uint64_t n) {
  return Radical(pow(as_rational(n), 6) * delta_radical(consts, n).radicand() / 64, 6);
}

// Window indices far outside every table are clamped; range sums clip anyway.
long to_long(const BigCount& z) {
  constexpr long kFar = 1L << 62;
  if (z > kFar) return kFar;
  if (z < -kFar) return -kFar;
  return z.get_si();
}

}  // namespace

ConstantSet ConstantSet::paper() { return {Rational(16), Rational(2466), Rational(589), Provenance::paper}; }

ConstantSet ConstantSet::custom(Rational K, Rational Ktilde, Rational c) {
  if (sgn(K) <= 0 || sgn(Ktilde) <= 0 || sgn(c) <= 0) throw DomainError("K, Ktilde and c must all be positive");
  return {std::move(K), std::move(Ktilde), std::move(c), Provenance::custom};
}

Radical ConstantSet::chat() const { return Radical(54 * c * sq(K), 3); }

std::string to_string(Provenance p) { return p == Provenance::paper ? "paper" : "custom"; }

Radical delta_radical(const ConstantSet& consts, std::uint64_t n) {
  require_level(n);
  return Radical(8 * 54 * consts.c * sq(consts.K) / (pow(consts.Ktilde, 3) * as_rational(n)), 6);
}

Radical remainder_radical(const ConstantSet& consts, std::uint64_t n) {
  require_level(n);
  return Radical(432 * consts.c * sq(consts.K) * pow(consts.Ktilde, 3) / as_rational(n), 6);
}

Enclosure delta_n(const ConstantSet& consts, std::uint64_t n, mpfr_prec_t precision) {
  return delta_radical(consts, n).enclose(precision);
}

Enclosure remainder_bound(const ConstantSet& consts, std::uint64_t n, mpfr_prec_t precision) {
  return remainder_radical(consts, n).enclose(precision);
}

BigCount first_level_below(const ConstantSet& consts, const Rational& threshold) {
  if (sgn(threshold) <= 0) throw DomainError("threshold must be positive");
  // R_n^6 = R_1^6 / n < threshold^6  <=>  n > R_1^6 / threshold^6
  return floor(Rational(remainder_radical(consts, 1).radicand() / pow(threshold, 6))) + 1;
}

Enclosure DensityEstimate::value(mpfr_prec_t precision) const {
  return Enclosure(window_mass, precision) / delta.enclose(precision);
}

DensityEstimate fn_eval(const CountTable& table, const ConstantSet& consts, const Rational& x) {
  const std::uint64_t n = table.n();
  require_level(n);
  const Rational center = expected_comparisons(n) + as_rational(n) * x;
  const Radical h = half_window(consts, n);
  // center - h < i <= center + h
  const BigCount first = floor_offset(center, h, -1) + 1;
  const BigCount last = floor_offset(center, h, +1);

  DensityEstimate est{n, Rational(0), to_long(first), to_long(last), delta_radical(consts, n),
                      remainder_radical(consts, n)};
  if (first <= last) {
    est.window_mass = Rational(table.range_sum(est.first_index, est.last_index), table.total());
    est.window_mass.canonicalize();
  }
  return est;
}

Enclosure DensityBracket::value(mpfr_prec_t precision) const {
  return Enclosure(mass_lo, mass_hi, precision) / delta.enclose(precision);
}

DensityBracket fn_bracket(const CountTable& table, const ConstantSet& consts, const ScaledRadical& x,
                          mpfr_prec_t precision) {
  const std::uint64_t n = table.n();
  require_level(n);
  if (auto exact = x.exact()) {
    auto est = fn_eval(table, consts, *exact);
    return {n, est.window_mass, est.window_mass, est.delta, est.error_bound};
  }
  const Enclosure center =
      Enclosure(expected_comparisons(n), precision) + Enclosure(as_rational(n), precision) * x.enclose(precision);
  const Enclosure h = half_window(consts, n).enclose(precision);
  const Enclosure lower = center - h;
  const Enclosure upper = center + h;

  auto floor_of = [](mpfr_srcptr v) {
    BigCount z;
    mpfr_get_z(z.get_mpz_t(), v, MPFR_RNDD);
    return z;
  };
  // The window is (lower, upper]; its integer range is
  // [floor(lower) + 1, floor(upper)], each end known up to the enclosure.
  const long first_inner = to_long(floor_of(lower.upper()) + 1);
  const long first_outer = to_long(floor_of(lower.lower()) + 1);
  const long last_inner = to_long(floor_of(upper.lower()));
  const long last_outer = to_long(floor_of(upper.upper()));

  auto mass = [&](long first, long last) {
    if (first > last) return Rational(0);
    Rational q(table.range_sum(first, last), table.total());
    q.canonicalize();
    return q;
  };
  return {n, mass(first_inner, last_inner), mass(first_outer, last_outer), delta_radical(consts, n),
          remainder_radical(consts, n)};
}

}  // namespace qslimit
