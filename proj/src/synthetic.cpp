#include "qslimit/synthetic.hpp"

#include <cmath>

namespace qslimit {

std::string to_string(SyntheticShape shape) {
  return shape == SyntheticShape::triangular ? "triangular" : "truncated-quadratic";
}

SyntheticShape parse_synthetic_shape(std::string_view name) {
  if (name == "triangular") return SyntheticShape::triangular;
  if (name == "truncated-quadratic") return SyntheticShape::truncated_quadratic;
  throw std::invalid_argument("unknown synthetic shape '" + std::string(name) + "'");
}

Rational synthetic_density(SyntheticShape shape, const Rational& x) {
  const Rational ax = abs(x);
  if (ax >= 1) return 0;
  if (shape == SyntheticShape::triangular) return 1 - ax;
  return Rational(3, 4) * (1 - x * x);
}

double synthetic_cdf(SyntheticShape shape, double x) {
  if (x <= -1) return 0.0;
  if (x >= 1) return 1.0;
  if (shape == SyntheticShape::triangular) {
    return x <= 0 ? 0.5 * (1 + x) * (1 + x) : 1 - 0.5 * (1 - x) * (1 - x);
  }
  return (2 + 3 * x - x * x * x) / 4;
}

EnvelopeSpec synthetic_envelope() { return EnvelopeSpec(Rational(1), Rational(1, 16)); }

SyntheticOracle::SyntheticOracle(SyntheticShape shape, ErrorSchedule schedule)
    : shape_(shape), schedule_(std::move(schedule)) {
  if (sgn(schedule_.amplitude) < 0 || !(schedule_.rate >= 0) || !std::isfinite(schedule_.rate)) {
    throw DomainError("error schedule needs amplitude >= 0 and a finite rate >= 0");
  }
}

Enclosure SyntheticOracle::error_bound(std::uint64_t level, mpfr_prec_t precision) const {
  if (sgn(schedule_.amplitude) == 0) return Enclosure(precision);
  return Enclosure(schedule_.amplitude, precision) * power(level, -schedule_.rate, precision);
}

OracleReply SyntheticOracle::eval(std::uint64_t level, const ScaledRadical& x, mpfr_prec_t precision) const {
  const auto point = x.exact();
  if (!point) throw std::logic_error("synthetic oracle needs rational proposal points");
  const Enclosure f(synthetic_density(shape_, *point), precision);
  Enclosure bound = error_bound(level, precision);
  if (sgn(schedule_.amplitude) == 0) return {f, std::move(bound)};
  const Enclosure wobble =
      Enclosure(Rational(9, 10), precision) * bound * cos(Enclosure(Rational(static_cast<unsigned long>(level)) * *point, precision));
  return {f + wobble, std::move(bound)};
}

bool dominated(const Rational& f, const EnvelopeSpec& envelope, const Rational& x) {
  if (envelope.crossover().compare(abs(x)) != std::strong_ordering::less) return f <= envelope.K();
  // f <= C / x^2  <=>  (f x^2)^2 <= C^2 for f >= 0
  const Rational fx2 = f * x * x;
  return fx2 * fx2 <= envelope.tail_coefficient_sq();
}

void check_domination(SyntheticShape shape, const EnvelopeSpec& envelope) {
  constexpr long kSteps = 4096;
  for (long j = -kSteps; j <= kSteps; ++j) {
    Rational x(j, 1024);
    x.canonicalize();
    if (!dominated(synthetic_density(shape, x), envelope, x)) {
      throw DomainError("envelope does not dominate the " + to_string(shape) + " density at x = " + to_string(x));
    }
  }
}

TargetSpec make_synthetic_target(SyntheticShape shape, ErrorSchedule schedule, std::optional<EnvelopeSpec> envelope) {
  if (sgn(schedule.amplitude) <= 0 || !(schedule.rate > 0)) {
    throw DomainError("synthetic error schedule needs amplitude > 0 and rate > 0");
  }
  EnvelopeSpec spec = envelope.value_or(synthetic_envelope());
  check_domination(shape, spec);
  return {spec, std::make_shared<SyntheticOracle>(shape, std::move(schedule)), TargetLabel::synthetic};
}

TargetSpec make_classical_target(SyntheticShape shape) {
  EnvelopeSpec spec = synthetic_envelope();
  check_domination(shape, spec);
  return {spec, std::make_shared<SyntheticOracle>(shape, ErrorSchedule{Rational(0), 0.0}), TargetLabel::synthetic};
}

}  // namespace qslimit
