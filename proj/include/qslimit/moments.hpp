// Moments of the limit law from the fixed-point equation
//   X = U X1 + (1 - U) X2 + toll(U),   toll(u) = 1 + 2u ln u + 2(1-u) ln(1-u).
//
// Raising both sides to the p-th power and using independence gives
//   m_p = (p+1)/(p-1) * sum multinomial(p; a,b,c) m_a m_b I(a,b,c)
// over a+b+c = p except (p,0,0) and (0,p,0), where
//   I(a,b,c) = int_0^1 u^a (1-u)^b toll(u)^c du.
#pragma once

#include <mutex>
#include <stdexcept>
#include <vector>

namespace qslimit {

/// A value with an absolute error bound.
struct Approx {
  double value = 0.0;
  double error = 0.0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved(achieved) {}
  double achieved;
};

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr unsigned kDefaultMaxOrder = 8;

/// toll(u) on [0, 1], extended by continuity (toll(0) = toll(1) = 1).
double toll(double u);

Approx mixed_integral(unsigned a, unsigned b, unsigned toll_power, unsigned max_order = kDefaultMaxOrder);

/// Moments m_0..m_max_order, computed once at construction.
class MomentTable {
 public:
  explicit MomentTable(unsigned max_order = kDefaultMaxOrder);

  unsigned max_order() const { return static_cast<unsigned>(moments_.size()) - 1; }
  const Approx& operator[](unsigned p) const { return moments_.at(p); }
  const std::vector<Approx>& all() const { return moments_; }

 private:
  std::vector<Approx> moments_;
};

/// m_p from a shared table built on first use.
Approx moment(unsigned p);

}  // namespace qslimit
