#include "qslimit/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <utility>

namespace qslimit {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

// RAII scratch value for the interval kernels below.
class Scratch {
 public:
  explicit Scratch(mpfr_prec_t p) { mpfr_init2(v_, p); }
  ~Scratch() { mpfr_clear(v_); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  mpfr_ptr get() { return v_; }
  operator mpfr_ptr() { return v_; }

 private:
  mpfr_t v_;
};

double to_double_down(mpfr_srcptr x) { return mpfr_get_d(x, MPFR_RNDD); }
double to_double_up(mpfr_srcptr x) { return mpfr_get_d(x, MPFR_RNDU); }

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) fail();

  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    result = Rational(mpz_class(std::string(num), 10), d);
    result.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view ex = s.substr(e + 1);
      bool eneg = false;
      if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
        eneg = ex.front() == '-';
        ex.remove_prefix(1);
      }
      if (!all_digits(ex) || ex.size() > 6) fail();
      exponent = std::stol(std::string(ex));
      if (eneg) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
      if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
        fail();
      digits = std::string(ip) + std::string(fp);
      exponent -= static_cast<long>(fp.size());
    } else {
      if (!all_digits(s)) fail();
      digits = std::string(s);
    }
    result = Rational(mpz_class(digits, 10)) * pow10(exponent);
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& q) { return q.get_str(10); }
std::string to_string(const BigCount& z) { return z.get_str(10); }

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value has no rational form");
  Rational q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

// ---------------------------------------------------------------- Enclosure

Enclosure::Enclosure(mpfr_prec_t precision) {
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Enclosure::Enclosure(const Rational& value, mpfr_prec_t precision) : Enclosure(value, value, precision) {}

Enclosure::Enclosure(const Rational& lo, const Rational& hi, mpfr_prec_t precision) {
  if (lo > hi) throw DomainError("enclosure bounds out of order");
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  mpfr_set_q(lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, hi.get_mpq_t(), MPFR_RNDU);
}

Enclosure Enclosure::from_double(double value, mpfr_prec_t precision) {
  if (!std::isfinite(value)) throw DomainError("non-finite value cannot be enclosed");
  Enclosure e(precision);
  mpfr_set_d(e.lo_, value, MPFR_RNDD);
  mpfr_set_d(e.hi_, value, MPFR_RNDU);
  return e;
}

Enclosure::Enclosure(const Enclosure& other) {
  mpfr_init2(lo_, other.precision());
  mpfr_init2(hi_, other.precision());
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Enclosure::Enclosure(Enclosure&& other) noexcept {
  mpfr_init2(lo_, MPFR_PREC_MIN);
  mpfr_init2(hi_, MPFR_PREC_MIN);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Enclosure& Enclosure::operator=(const Enclosure& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, other.precision());
    mpfr_set_prec(hi_, other.precision());
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Enclosure& Enclosure::operator=(Enclosure&& other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Enclosure::~Enclosure() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

double Enclosure::lo() const { return to_double_down(lo_); }
double Enclosure::hi() const { return to_double_up(hi_); }

double Enclosure::mid() const {
  Scratch m(precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  return mpfr_get_d(m, MPFR_RNDN);
}

double Enclosure::width() const {
  Scratch w(precision());
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  return to_double_up(w);
}

Rational Enclosure::lo_exact() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), lo_);
  return q;
}

Rational Enclosure::hi_exact() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), hi_);
  return q;
}

bool Enclosure::contains(const Rational& q) const {
  return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool Enclosure::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

Enclosure Enclosure::operator-() const {
  Enclosure r(precision());
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Enclosure Enclosure::reciprocal() const {
  if (contains_zero()) throw DomainError("reciprocal of an enclosure containing zero");
  Enclosure r(precision());
  mpfr_ui_div(r.lo_, 1, hi_, MPFR_RNDD);
  mpfr_ui_div(r.hi_, 1, lo_, MPFR_RNDU);
  return r;
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  Enclosure r(std::max(a.precision(), b.precision()));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Enclosure operator-(const Enclosure& a, const Enclosure& b) {
  Enclosure r(std::max(a.precision(), b.precision()));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  const mpfr_prec_t p = std::max(a.precision(), b.precision());
  Enclosure r(p);
  Scratch t(p);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t.get(), MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) { return a * b.reciprocal(); }

Enclosure hull(const Enclosure& a, const Enclosure& b) {
  Enclosure r(std::max(a.precision(), b.precision()));
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Enclosure root(const Enclosure& x, unsigned k) {
  if (k == 0) throw DomainError("root index must be positive");
  if (mpfr_sgn(x.lo_) < 0) throw DomainError("root of a possibly negative value");
  Enclosure r(x.precision());
  mpfr_rootn_ui(r.lo_, x.lo_, k, MPFR_RNDD);
  mpfr_rootn_ui(r.hi_, x.hi_, k, MPFR_RNDU);
  return r;
}

// cos is monotone between consecutive multiples of pi; the range picks up
// +1 or -1 whenever the interval may contain an even or odd multiple.
Enclosure cos(const Enclosure& x) {
  const mpfr_prec_t p = x.precision();
  Enclosure r(p);
  Scratch span(p);
  mpfr_sub(span, x.hi_, x.lo_, MPFR_RNDU);
  if (mpfr_cmp_ui(span, 7) >= 0 || mpfr_cmpabs_ui(x.lo_, 1UL << 50) > 0 ||
      mpfr_cmpabs_ui(x.hi_, 1UL << 50) > 0) {
    mpfr_set_si(r.lo_, -1, MPFR_RNDD);
    mpfr_set_si(r.hi_, 1, MPFR_RNDU);
    return r;
  }
  Scratch t(p);
  mpfr_cos(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_cos(t, x.hi_, MPFR_RNDD);
  mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
  mpfr_cos(r.hi_, x.lo_, MPFR_RNDU);
  mpfr_cos(t, x.hi_, MPFR_RNDU);
  mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);

  Scratch pi_lo(p), pi_hi(p);
  mpfr_const_pi(pi_lo, MPFR_RNDD);
  mpfr_const_pi(pi_hi, MPFR_RNDU);
  const double approx_pi = 3.141592653589793;
  const auto first = static_cast<long>(std::floor(mpfr_get_d(x.lo_, MPFR_RNDD) / approx_pi)) - 1;
  const auto last = static_cast<long>(std::floor(mpfr_get_d(x.hi_, MPFR_RNDU) / approx_pi)) + 1;
  for (long j = first; j <= last; ++j) {
    // Could j*pi lie in [lo, hi]?
    mpfr_mul_si(t, j >= 0 ? pi_hi : pi_lo, j, MPFR_RNDU);
    if (mpfr_less_p(t, x.lo_)) continue;
    mpfr_mul_si(t, j >= 0 ? pi_lo : pi_hi, j, MPFR_RNDD);
    if (mpfr_greater_p(t, x.hi_)) continue;
    if (j % 2 == 0) {
      mpfr_set_ui(r.hi_, 1, MPFR_RNDU);
    } else {
      mpfr_set_si(r.lo_, -1, MPFR_RNDD);
    }
  }
  return r;
}

Enclosure power(std::uint64_t base, double exponent, mpfr_prec_t precision) {
  if (base == 0) throw DomainError("power requires a positive base");
  Enclosure r(precision);
  Scratch e(64);
  mpfr_set_d(e, exponent, MPFR_RNDN);  // exact: 53 bits fit
  static_assert(sizeof(unsigned long) >= sizeof(std::uint64_t));
  mpfr_ui_pow(r.lo_, static_cast<unsigned long>(base), e, MPFR_RNDD);
  mpfr_ui_pow(r.hi_, static_cast<unsigned long>(base), e, MPFR_RNDU);
  return r;
}

Enclosure enclose_root(const Rational& x, unsigned k, double relative_width) {
  if (sgn(x) < 0) throw DomainError("enclose_root of a negative value");
  if (k == 0) throw DomainError("root index must be positive");
  if (!(relative_width > 0)) throw DomainError("relative width must be positive");
  const auto bits = static_cast<mpfr_prec_t>(std::ceil(-std::log2(relative_width))) + 8;
  const mpfr_prec_t p = std::clamp<mpfr_prec_t>(bits, 8, kMaxPrecision * 4);
  return root(Enclosure(x, p), k);
}

Enclosure enclose_root(const Enclosure& x, unsigned k) { return root(x, k); }

Comparison compare_with_enclosure(const Rational& q, const Enclosure& e) {
  if (mpfr_cmp_q(e.lower(), q.get_mpq_t()) > 0) return Comparison::less;
  if (mpfr_cmp_q(e.upper(), q.get_mpq_t()) < 0) return Comparison::greater;
  return Comparison::indeterminate;
}

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::less: return "less";
    case Comparison::greater: return "greater";
    case Comparison::indeterminate: return "indeterminate";
  }
  return "?";
}

// ------------------------------------------------------------------ Radical

namespace {

std::optional<mpz_class> exact_root(const mpz_class& z, unsigned k) {
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), z.get_mpz_t(), k) != 0) return r;
  return std::nullopt;
}

}  // namespace

Rational pow(const Rational& q, unsigned k) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), k);
  mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), k);
  return r;
}

Radical::Radical(Rational radicand, unsigned index) : radicand_(std::move(radicand)), index_(index) {
  if (index_ == 0) throw DomainError("root index must be positive");
  if (sgn(radicand_) < 0) throw DomainError("negative radicand");
  auto num = exact_root(radicand_.get_num(), index_);
  auto den = exact_root(radicand_.get_den(), index_);
  if (num && den) exact_ = Rational(*num, *den);
}

Enclosure Radical::enclose(mpfr_prec_t precision) const {
  if (exact_) return Enclosure(*exact_, precision);
  return root(Enclosure(radicand_, precision), index_);
}

double Radical::approx() const { return enclose(kDefaultPrecision).mid(); }

std::strong_ordering Radical::compare(const Rational& q) const {
  if (sgn(q) < 0) return std::strong_ordering::greater;
  const int c = cmp(radicand_, pow(q, index_));
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Enclosure ScaledRadical::enclose(mpfr_prec_t precision) const {
  if (auto e = exact()) return Enclosure(*e, precision);
  return scale.enclose(precision) * Enclosure(ratio, precision);
}

std::optional<Rational> ScaledRadical::exact() const {
  if (const auto& s = scale.exact()) return Rational(*s * ratio);
  if (sgn(ratio) == 0) return Rational(0);
  return std::nullopt;
}

double ScaledRadical::approx() const { return enclose(kDefaultPrecision).mid(); }

BigCount floor(const Rational& q) {
  BigCount z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return z;
}

BigCount floor_offset(const Rational& base, const Radical& h, int sign) {
  if (const auto& e = h.exact()) return floor(sign > 0 ? Rational(base + *e) : Rational(base - *e));
  const Enclosure hv = h.enclose(kDefaultPrecision);
  const Enclosure v = Enclosure(base, kDefaultPrecision) + (sign > 0 ? hv : -hv);
  BigCount lo, hi;
  mpfr_get_z(lo.get_mpz_t(), v.lower(), MPFR_RNDD);
  mpfr_get_z(hi.get_mpz_t(), v.upper(), MPFR_RNDD);
  // Resolve the (rare) straddled integers exactly: base + sign*h >= j ?
  for (BigCount j = hi; j > lo; --j) {
    const Rational gap = Rational(j) - base;
    const bool reaches = sign > 0 ? h.compare(gap) != std::strong_ordering::less
                                  : h.compare(Rational(-gap)) != std::strong_ordering::greater;
    if (reaches) return j;
  }
  return lo;
}

}  // namespace qslimit
