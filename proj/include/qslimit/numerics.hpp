// Exact and outward-rounded arithmetic shared by every other module.
//
// Counts are GMP integers, probabilities and moments of C_n are GMP
// rationals, and irrational constants are carried either symbolically as
// k-th roots of rationals (Radical) or numerically as MPFR intervals whose
// endpoints are rounded outward (Enclosure).
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace qslimit {

using BigCount = mpz_class;
using Rational = mpq_class;

/// Working precision of enclosures unless a caller asks for more.
inline constexpr mpfr_prec_t kDefaultPrecision = 64;
/// Upper limit for refinement loops.
inline constexpr mpfr_prec_t kMaxPrecision = 4096;
/// Default relative width target for enclose_root.
inline constexpr double kDefaultRelativeWidth = 0x1p-40;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parses "3", "-7/4", "0.125", "-1.5e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q" (or "p" when q == 1).
std::string to_string(const Rational& q);
std::string to_string(const BigCount& z);

/// Exact rational value of a finite double.
Rational rational_from_double(double v);

/// Closed interval [lo, hi] with MPFR endpoints. Every operation rounds
/// lo toward -inf and hi toward +inf, so the exact real result of the
/// operation applied to any points of the operands lies inside.
class Enclosure {
 public:
  explicit Enclosure(mpfr_prec_t precision = kDefaultPrecision);
  Enclosure(const Rational& value, mpfr_prec_t precision);
  Enclosure(const Rational& lo, const Rational& hi, mpfr_prec_t precision);
  static Enclosure from_double(double value, mpfr_prec_t precision = kDefaultPrecision);

  Enclosure(const Enclosure& other);
  Enclosure(Enclosure&& other) noexcept;
  Enclosure& operator=(const Enclosure& other);
  Enclosure& operator=(Enclosure&& other) noexcept;
  ~Enclosure();

  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lower() const { return lo_; }
  mpfr_srcptr upper() const { return hi_; }

  /// Endpoints rounded outward to double.
  double lo() const;
  double hi() const;
  double mid() const;
  double width() const;
  Rational lo_exact() const;
  Rational hi_exact() const;

  bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
  bool contains(const Rational& q) const;
  bool contains_zero() const;

  Enclosure operator-() const;
  Enclosure reciprocal() const;

  friend Enclosure operator+(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator-(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator*(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator/(const Enclosure& a, const Enclosure& b);

  friend Enclosure hull(const Enclosure& a, const Enclosure& b);
  friend Enclosure root(const Enclosure& x, unsigned k);
  friend Enclosure cos(const Enclosure& x);
  friend Enclosure power(std::uint64_t base, double exponent, mpfr_prec_t precision);

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

/// Convex hull.
Enclosure hull(const Enclosure& a, const Enclosure& b);

/// k-th root of a nonnegative rational with relative width at most
/// `relative_width` (floored at what the working precision allows).
Enclosure enclose_root(const Rational& x, unsigned k,
                       double relative_width = kDefaultRelativeWidth);
Enclosure enclose_root(const Enclosure& x, unsigned k);

/// Interval extension of base^exponent for a positive integer base.
Enclosure power(std::uint64_t base, double exponent,
                mpfr_prec_t precision = kDefaultPrecision);

enum class Comparison { less, greater, indeterminate };

/// less iff q < e.lo, greater iff q > e.hi, indeterminate otherwise.
Comparison compare_with_enclosure(const Rational& q, const Enclosure& e);

std::string_view to_string(Comparison c);

/// The nonnegative real radicand^(1/index), kept symbolically so that
/// comparisons against rationals can always be decided exactly.
class Radical {
 public:
  Radical(Rational radicand, unsigned index);

  const Rational& radicand() const { return radicand_; }
  unsigned index() const { return index_; }

  Enclosure enclose(mpfr_prec_t precision = kDefaultPrecision) const;
  /// Set when the radicand is a perfect index-th power.
  const std::optional<Rational>& exact() const { return exact_; }
  double approx() const;

  /// Ordering of this value relative to q, decided exactly.
  std::strong_ordering compare(const Rational& q) const;

 private:
  Rational radicand_;
  unsigned index_;
  std::optional<Rational> exact_;
};

/// scale * ratio, the shape of every proposal point a*S*U1/U2.
struct ScaledRadical {
  Radical scale;
  Rational ratio;

  Enclosure enclose(mpfr_prec_t precision = kDefaultPrecision) const;
  std::optional<Rational> exact() const;
  double approx() const;
};

/// q^k for an integer exponent k >= 0.
Rational pow(const Rational& q, unsigned k);

/// floor(base + sign * h), decided exactly.
BigCount floor_offset(const Rational& base, const Radical& h, int sign);

BigCount floor(const Rational& q);

}  // namespace qslimit
