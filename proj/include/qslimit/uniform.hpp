// Reproducible source of uniform variates for the envelope and the sampler.
#pragma once

#include <cstdint>
#include <random>

#include "qslimit/numerics.hpp"

namespace qslimit {

/// A seeded stream of uniform [0,1) variates. Variates are 53-bit dyadic
/// rationals k / 2^53 and are treated as exact rationals downstream.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }
  /// k / 2^53 with k uniform in [0, 2^53).
  Rational next_dyadic();
  /// Same variate as next_dyadic, as a double (exact).
  double next_unit();
  /// Nonzero dyadic variate; zero draws are redrawn.
  Rational next_positive_dyadic();
  /// Equiprobable +1 / -1.
  int next_sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

/// A uniform variate whose binary expansion is revealed on demand. After b
/// bits the variate is known to lie in [k / 2^b, (k + 1) / 2^b).
class LazyUniform {
 public:
  LazyUniform(UniformStream& stream, unsigned initial_bits = 53);

  /// Reveals `extra_bits` more bits from the stream.
  void refine(UniformStream& stream, unsigned extra_bits = 64);

  unsigned bits() const { return bits_; }
  Rational lower() const;
  Rational upper() const;

 private:
  BigCount numerator_;
  unsigned bits_ = 0;
};

}  // namespace qslimit
