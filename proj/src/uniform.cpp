#include "qslimit/uniform.hpp"

namespace qslimit {

namespace {

Rational dyadic(const BigCount& k, unsigned bits) {
  Rational q(k);
  mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), bits);
  return q;
}

}  // namespace

Rational UniformStream::next_dyadic() {
  const std::uint64_t k = engine_() >> 11;
  return dyadic(BigCount(static_cast<unsigned long>(k)), 53);
}

double UniformStream::next_unit() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

Rational UniformStream::next_positive_dyadic() {
  for (;;) {
    const std::uint64_t k = engine_() >> 11;
    if (k != 0) return dyadic(BigCount(static_cast<unsigned long>(k)), 53);
  }
}

LazyUniform::LazyUniform(UniformStream& stream, unsigned initial_bits) { refine(stream, initial_bits); }

void LazyUniform::refine(UniformStream& stream, unsigned extra_bits) {
  while (extra_bits > 0) {
    const unsigned take = extra_bits < 64 ? extra_bits : 64;
    const std::uint64_t chunk = take == 64 ? stream.next_bits() : stream.next_bits() >> (64 - take);
    numerator_ <<= take;
    numerator_ += BigCount(static_cast<unsigned long>(chunk));
    bits_ += take;
    extra_bits -= take;
  }
}

Rational LazyUniform::lower() const { return dyadic(numerator_, bits_); }
Rational LazyUniform::upper() const { return dyadic(numerator_ + 1, bits_); }

}  // namespace qslimit
