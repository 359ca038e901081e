// Test targets with closed-form densities, used to exercise the sampler end
// to end where f is known exactly.
#pragma once

#include <optional>

#include "qslimit/sampler.hpp"

namespace qslimit {

enum class SyntheticShape {
  triangular,           ///< f(x) = 1 - |x| on [-1, 1]
  truncated_quadratic,  ///< f(x) = 3/4 (1 - x^2) on [-1, 1]
};

std::string to_string(SyntheticShape shape);
SyntheticShape parse_synthetic_shape(std::string_view name);

/// R_n = amplitude * n^(-rate).
struct ErrorSchedule {
  Rational amplitude{1};
  double rate = 0.5;
};

Rational synthetic_density(SyntheticShape shape, const Rational& x);
double synthetic_cdf(SyntheticShape shape, double x);

/// min(1, (1/4) / x^2): crossover a = 1/2, mass 2.
EnvelopeSpec synthetic_envelope();

/// Answers f_n(x) = f(x) + 0.9 R_n cos(n x), so |f_n(x) - f(x)| <= R_n holds
/// by construction. Proposal points must be rational.
class SyntheticOracle final : public ApproximationOracle {
 public:
  SyntheticOracle(SyntheticShape shape, ErrorSchedule schedule);
  OracleReply eval(std::uint64_t level, const ScaledRadical& x, mpfr_prec_t precision) const override;
  Enclosure error_bound(std::uint64_t level, mpfr_prec_t precision = kDefaultPrecision) const;
  SyntheticShape shape() const { return shape_; }

 private:
  SyntheticShape shape_;
  ErrorSchedule schedule_;
};

/// Exact test of f(x) <= g(x) for f(x) >= 0.
bool dominated(const Rational& f, const EnvelopeSpec& envelope, const Rational& x);

/// Throws DomainError if the envelope falls below f anywhere on a fine
/// rational grid over [-4, 4].
void check_domination(SyntheticShape shape, const EnvelopeSpec& envelope);

/// Requires amplitude > 0 and rate > 0.
TargetSpec make_synthetic_target(SyntheticShape shape, ErrorSchedule schedule,
                                 std::optional<EnvelopeSpec> envelope = std::nullopt);

/// Exact oracle (R_n = 0): the sampler reduces to classical rejection.
TargetSpec make_classical_target(SyntheticShape shape);

}  // namespace qslimit
