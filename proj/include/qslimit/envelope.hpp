// Dominating density g(x) = min(K, C / x^2) with C = sqrt(2 Ktilde), its
// normalization, distribution function and exact sampler.
#pragma once

#include "qslimit/density.hpp"
#include "qslimit/numerics.hpp"
#include "qslimit/uniform.hpp"

namespace qslimit {

/// g(x) = min(K, C / x^2). C is stored through C^2 so that C = sqrt(2 Ktilde)
/// stays exact. The crossover abscissa is a = sqrt(C / K).
class EnvelopeSpec {
 public:
  EnvelopeSpec(Rational K, Rational tail_coefficient_sq);

  /// K from the constant set, C = sqrt(2 Ktilde).
  static EnvelopeSpec from_constants(const ConstantSet& consts);

  const Rational& K() const { return K_; }
  const Rational& tail_coefficient_sq() const { return tail_sq_; }
  Radical tail_coefficient() const { return Radical(tail_sq_, 2); }
  /// a = (C^2 / K^2)^(1/4) = (2 Ktilde)^(1/4) / K^(1/2)
  const Radical& crossover() const { return crossover_; }
  double crossover_approx() const { return crossover_approx_; }
  /// ||g||_1 = 4 sqrt(C K) = 4 K^(1/2) (2 Ktilde)^(1/4)
  Radical mass() const { return Radical(256 * tail_sq_ * K_ * K_, 4); }
  /// xi = 1 / ||g||_1
  Enclosure xi(mpfr_prec_t precision = kDefaultPrecision) const { return mass().enclose(precision).reciprocal(); }

 private:
  Rational K_;
  Rational tail_sq_;
  Radical crossover_;
  double crossover_approx_;
};

Enclosure envelope_density(const EnvelopeSpec& spec, const Rational& x, mpfr_prec_t precision = kDefaultPrecision);
Enclosure envelope_density(const EnvelopeSpec& spec, double x, mpfr_prec_t precision = kDefaultPrecision);

/// g(a r) = K min(1, 1 / r^2), exact for every proposal point a r.
Rational envelope_density_at_ratio(const EnvelopeSpec& spec, const Rational& ratio);

Enclosure envelope_mass(const EnvelopeSpec& spec, mpfr_prec_t precision = kDefaultPrecision);

/// Distribution function of g / ||g||_1.
Enclosure envelope_cdf(const EnvelopeSpec& spec, const Rational& x, mpfr_prec_t precision = kDefaultPrecision);
Enclosure envelope_cdf(const EnvelopeSpec& spec, double x, mpfr_prec_t precision = kDefaultPrecision);

/// One draw a S U1 / U2 kept in exact form.
struct Proposal {
  int sign = 1;
  Rational u1;
  Rational u2;
  Rational ratio;  ///< S U1 / U2
  ScaledRadical point(const EnvelopeSpec& spec) const { return {spec.crossover(), ratio}; }
};

Proposal sample_proposal(UniformStream& rng);

/// a S U1 / U2 rounded to double.
double sample_envelope(const EnvelopeSpec& spec, UniformStream& rng);

}  // namespace qslimit
