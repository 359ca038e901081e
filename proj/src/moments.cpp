#include "qslimit/moments.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/factorials.hpp>

namespace qslimit {

double toll(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("toll is defined on [0, 1], got " + std::to_string(u));
  auto xlogx = [](double v) { return v == 0.0 ? 0.0 : v * std::log(v); };
  return 1.0 + 2.0 * xlogx(u) + 2.0 * xlogx(1.0 - u);
}

Approx mixed_integral(unsigned a, unsigned b, unsigned toll_power, unsigned max_order) {
  if (a + b + toll_power > max_order) {
    throw std::domain_error("mixed_integral order " + std::to_string(a + b + toll_power) + " exceeds " +
                            std::to_string(max_order));
  }
  auto integrand = [=](double u) {
    return std::pow(u, a) * std::pow(1.0 - u, b) * std::pow(toll(u), toll_power);
  };
  // toll' blows up logarithmically at both ends; tanh-sinh clusters nodes
  // there. Split at 1/2 so each half has one singular endpoint.
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double e1 = 0.0, e2 = 0.0;
  const double left = rule.integrate(integrand, 0.0, 0.5, 1e-12, &e1);
  const double right = rule.integrate(integrand, 0.5, 1.0, 1e-12, &e2);
  const double error = e1 + e2 + 4 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
  if (!(error <= kQuadratureTolerance)) {
    throw QuadratureError("quadrature of I(" + std::to_string(a) + "," + std::to_string(b) + "," +
                              std::to_string(toll_power) + ") reached only " + std::to_string(error),
                          error);
  }
  return {left + right, error};
}

MomentTable::MomentTable(unsigned max_order) {
  moments_.push_back({1.0, 0.0});
  if (max_order >= 1) moments_.push_back({0.0, 0.0});
  for (unsigned p = 2; p <= max_order; ++p) {
    double sum = 0.0, err = 0.0;
    for (unsigned a = 0; a <= p; ++a) {
      for (unsigned b = 0; a + b <= p; ++b) {
        const unsigned c = p - a - b;
        if ((a == p || b == p) || a == 1 || b == 1) continue;  // excluded, or m_1 = 0
        const double coef = boost::math::factorial<double>(p) /
                            (boost::math::factorial<double>(a) * boost::math::factorial<double>(b) *
                             boost::math::factorial<double>(c));
        const Approx i = mixed_integral(a, b, c, max_order);
        const Approx& ma = moments_[a];
        const Approx& mb = moments_[b];
        sum += coef * ma.value * mb.value * i.value;
        err += coef * (std::abs(ma.value * mb.value) * i.error +
                       std::abs(i.value) * (std::abs(ma.value) * mb.error + std::abs(mb.value) * ma.error +
                                            ma.error * mb.error));
      }
    }
    const double scale = static_cast<double>(p + 1) / static_cast<double>(p - 1);
    moments_.push_back({scale * sum, scale * err + 8 * std::numeric_limits<double>::epsilon() * std::abs(scale * sum)});
  }
}

Approx moment(unsigned p) {
  static const MomentTable table(kDefaultMaxOrder);
  if (p > table.max_order()) return MomentTable(p)[p];
  return table[p];
}

}  // namespace qslimit
