// Smoothed-histogram approximation f_n of the limit density, with the
// certified uniform error bound R_n.
//
//   f_n(x) = (F_n(x + delta_n/2) - F_n(x - delta_n/2)) / delta_n
//   delta_n = (2 chat / Ktilde)^(1/2) n^(-1/6),   chat = (54 c K^2)^(1/3)
//   R_n     = (432 c K^2 Ktilde^3)^(1/6) n^(-1/6)
//
// where F_n is the distribution function of (C_n - E C_n) / n. The bound
// |f_n - f| <= R_n is a theorem only for the published constants
// K = 16, Ktilde = 2466, c = 589 (Provenance::paper).
#pragma once

#include <cstdint>
#include <string>

#include "qslimit/numerics.hpp"
#include "qslimit/tables.hpp"

namespace qslimit {

enum class Provenance { paper, custom };

struct ConstantSet {
  Rational K;       ///< sup f
  Rational Ktilde;  ///< sup |f'|
  Rational c;       ///< rate constant of the local limit theorem
  Provenance provenance = Provenance::paper;

  static ConstantSet paper();
  /// Unproven constants; throws DomainError unless all are positive.
  static ConstantSet custom(Rational K, Rational Ktilde, Rational c);

  /// chat = (54 c K^2)^(1/3)
  Radical chat() const;
  bool proven() const { return provenance == Provenance::paper; }
};

std::string to_string(Provenance p);

/// delta_n as the sixth root of 8 * 54 c K^2 / (Ktilde^3 n).
Radical delta_radical(const ConstantSet& consts, std::uint64_t n);
/// R_n as the sixth root of 432 c K^2 Ktilde^3 / n.
Radical remainder_radical(const ConstantSet& consts, std::uint64_t n);

Enclosure delta_n(const ConstantSet& consts, std::uint64_t n, mpfr_prec_t precision = kDefaultPrecision);
Enclosure remainder_bound(const ConstantSet& consts, std::uint64_t n, mpfr_prec_t precision = kDefaultPrecision);

/// Smallest n with R_n < threshold.
BigCount first_level_below(const ConstantSet& consts, const Rational& threshold);

/// f_n(x) at a rational point. The window probability is exact; the
/// irrational 1/delta_n factor stays symbolic.
struct DensityEstimate {
  std::uint64_t level = 0;
  Rational window_mass;  ///< F_n(x + delta_n/2) - F_n(x - delta_n/2)
  std::int64_t first_index = 0;  ///< comparison counts first..last lie in the window
  std::int64_t last_index = -1;
  Radical delta;
  Radical error_bound;

  Enclosure value(mpfr_prec_t precision = kDefaultPrecision) const;
};

DensityEstimate fn_eval(const CountTable& table, const ConstantSet& consts, const Rational& x);

/// f_n at a point known only through enclosures. Integers whose side of a
/// window boundary cannot be resolved at `precision` widen the result into
/// [mass_lo, mass_hi].
struct DensityBracket {
  std::uint64_t level = 0;
  Rational mass_lo;
  Rational mass_hi;
  Radical delta;
  Radical error_bound;

  bool resolved() const { return mass_lo == mass_hi; }
  Enclosure value(mpfr_prec_t precision = kDefaultPrecision) const;
};

DensityBracket fn_bracket(const CountTable& table, const ConstantSet& consts, const ScaledRadical& x,
                          mpfr_prec_t precision = kDefaultPrecision);

}  // namespace qslimit
