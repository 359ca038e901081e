#include "qslimit/envelope.hpp"

namespace qslimit {

namespace {

Rational checked_positive(Rational q) {
  if (sgn(q) <= 0) throw DomainError("envelope constants must be positive");
  return q;
}

}  // namespace

EnvelopeSpec::EnvelopeSpec(Rational K, Rational tail_coefficient_sq)
    : K_(checked_positive(std::move(K))),
      tail_sq_(checked_positive(std::move(tail_coefficient_sq))),
      crossover_(tail_sq_ / (K_ * K_), 4),
      crossover_approx_(crossover_.approx()) {}

EnvelopeSpec EnvelopeSpec::from_constants(const ConstantSet& consts) { return EnvelopeSpec(consts.K, 2 * consts.Ktilde); }

Enclosure envelope_density(const EnvelopeSpec& spec, const Rational& x, mpfr_prec_t precision) {
  const Rational ax = abs(x);
  if (spec.crossover().compare(ax) != std::strong_ordering::less) return Enclosure(spec.K(), precision);
  return spec.tail_coefficient().enclose(precision) / Enclosure(ax * ax, precision);
}

Enclosure envelope_density(const EnvelopeSpec& spec, double x, mpfr_prec_t precision) {
  return envelope_density(spec, rational_from_double(x), precision);
}

Rational envelope_density_at_ratio(const EnvelopeSpec& spec, const Rational& ratio) {
  const Rational r2 = ratio * ratio;
  return r2 <= 1 ? spec.K() : Rational(spec.K() / r2);
}

Enclosure envelope_mass(const EnvelopeSpec& spec, mpfr_prec_t precision) { return spec.mass().enclose(precision); }

Enclosure envelope_cdf(const EnvelopeSpec& spec, const Rational& x, mpfr_prec_t precision) {
  const Radical a = spec.crossover();
  const Enclosure xi = spec.xi(precision);
  const Enclosure one(Rational(1), precision);
  const Rational ax = abs(x);
  if (a.compare(ax) == std::strong_ordering::less) {
    // tail: xi C / |x|
    const Enclosure tail = xi * spec.tail_coefficient().enclose(precision) / Enclosure(ax, precision);
    return sgn(x) < 0 ? tail : one - tail;
  }
  return Enclosure(Rational(1, 2), precision) + xi * Enclosure(Rational(spec.K() * x), precision);
}

Enclosure envelope_cdf(const EnvelopeSpec& spec, double x, mpfr_prec_t precision) {
  return envelope_cdf(spec, rational_from_double(x), precision);
}

Proposal sample_proposal(UniformStream& rng) {
  Proposal p;
  p.u1 = rng.next_dyadic();
  p.u2 = rng.next_positive_dyadic();
  p.sign = rng.next_sign();
  p.ratio = p.u1 / p.u2;
  if (p.sign < 0) p.ratio = -p.ratio;
  return p;
}

double sample_envelope(const EnvelopeSpec& spec, UniformStream& rng) {
  return spec.crossover_approx() * sample_proposal(rng).ratio.get_d();
}

}  // namespace qslimit
