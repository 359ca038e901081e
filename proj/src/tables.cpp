#include "qslimit/tables.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <thread>

namespace qslimit {

SupportBounds support_bounds(std::uint64_t n) {
  SupportBounds b;
  b.n = n;
  b.k = static_cast<std::uint64_t>(std::bit_width(n + 1)) - 1;
  b.m_n = b.k * (n + 1) + 2 - (std::uint64_t{1} << (b.k + 1));
  b.M_n = n * (n - (n > 0 ? 1 : 0)) / 2;
  return b;
}

std::uint64_t min_cost_by_recurrence(std::uint64_t n) {
  std::uint64_t m = 0;
  for (std::uint64_t j = 1; j <= n; ++j) m += static_cast<std::uint64_t>(std::bit_width(j)) - 1;
  return m;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> support_by_recurrence(std::uint64_t n_max) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(n_max + 1);
  out.emplace_back(0, 0);
  for (std::uint64_t j = 1; j <= n_max; ++j) {
    const auto& [m, M] = out.back();
    out.emplace_back(m + static_cast<std::uint64_t>(std::bit_width(j)) - 1, M + (j - 1));
  }
  return out;
}

// ------------------------------------------------------------- CountTable

CountTable::CountTable(std::uint64_t n, std::uint64_t min_cost, std::vector<BigCount> counts)
    : n_(n), min_cost_(min_cost), counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("count table needs at least one entry");
  for (const auto& c : counts_) {
    if (sgn(c) < 0) throw TableInvariantError("negative count");
    total_ += c;
  }
}

CountTable CountTable::empty_list() { return CountTable(0, 0, {BigCount(1)}); }

BigCount CountTable::count(std::int64_t i) const {
  if (i < static_cast<std::int64_t>(min_cost_) || i > static_cast<std::int64_t>(max_cost())) return 0;
  return counts_[static_cast<std::size_t>(i) - min_cost_];
}

BigCount CountTable::range_sum(std::int64_t first, std::int64_t last) const {
  first = std::max<std::int64_t>(first, static_cast<std::int64_t>(min_cost_));
  last = std::min<std::int64_t>(last, static_cast<std::int64_t>(max_cost()));
  BigCount s;
  for (std::int64_t i = first; i <= last; ++i) s += counts_[static_cast<std::size_t>(i) - min_cost_];
  return s;
}

Rational CountTable::mean() const {
  BigCount weighted;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    weighted += counts_[j] * static_cast<unsigned long>(min_cost_ + j);
  }
  Rational q(weighted, total_);
  q.canonicalize();
  return q;
}

Rational CountTable::variance() const {
  BigCount s1, s2;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    const auto i = static_cast<unsigned long>(min_cost_ + j);
    s1 += counts_[j] * i;
    s2 += counts_[j] * i * i;
  }
  Rational m1(s1, total_), m2(s2, total_);
  m1.canonicalize();
  m2.canonicalize();
  return m2 - m1 * m1;
}

BigCount factorial(std::uint64_t n) {
  BigCount f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

BigCount binomial(std::uint64_t n, std::uint64_t k) {
  BigCount b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

Rational harmonic(std::uint64_t n) {
  Rational h;
  for (std::uint64_t j = 1; j <= n; ++j) h += Rational(1, static_cast<unsigned long>(j));
  return h;
}

Rational expected_comparisons(std::uint64_t n) {
  const auto n1 = static_cast<unsigned long>(n);
  return Rational(2 * (n1 + 1)) * harmonic(n) - Rational(4 * n1);
}

// ------------------------------------------------------------ convolution

namespace {

struct SplitTerm {
  std::uint64_t k;    // pivot rank, 1-based
  BigCount factor;    // interleavings, doubled when the mirror split is folded in
};

std::vector<SplitTerm> split_terms(std::uint64_t n, bool omit_interleaving) {
  std::vector<SplitTerm> terms;
  for (std::uint64_t k = 1; 2 * k <= n + 1; ++k) {
    BigCount f = omit_interleaving ? BigCount(1) : binomial(n - 1, k - 1);
    if (k != n + 1 - k) f *= 2;
    terms.push_back({k, std::move(f)});
  }
  return terms;
}

void schoolbook_accumulate(std::vector<BigCount>& acc, std::uint64_t base, const CountTable& left,
                           const CountTable& right, const BigCount& factor, std::uint64_t offset) {
  std::vector<BigCount> scaled(left.counts().size());
  for (std::size_t l = 0; l < scaled.size(); ++l) scaled[l] = left.counts()[l] * factor;
  const auto& rc = right.counts();
  const std::uint64_t start = offset + left.min_cost() + right.min_cost() - base;
  for (std::size_t l = 0; l < scaled.size(); ++l) {
    mpz_srcptr a = scaled[l].get_mpz_t();
    BigCount* out = acc.data() + start + l;
    for (std::size_t r = 0; r < rc.size(); ++r) mpz_addmul(out[r].get_mpz_t(), a, rc[r].get_mpz_t());
  }
}

// Coefficients are laid out in fixed slots of `slot_limbs` limbs so that a
// single big-integer product realizes the whole convolution.
class PackedSequence {
 public:
  PackedSequence(std::size_t slot_limbs) : slot_limbs_(slot_limbs) {}

  BigCount pack(const std::vector<BigCount>& coeffs, std::uint64_t first_slot, const BigCount& factor) const {
    std::vector<mp_limb_t> limbs((first_slot + coeffs.size()) * slot_limbs_, 0);
    BigCount scaled;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      scaled = coeffs[j] * factor;
      mpz_export(limbs.data() + (first_slot + j) * slot_limbs_, nullptr, -1, sizeof(mp_limb_t), 0, 0,
                 scaled.get_mpz_t());
    }
    BigCount z;
    mpz_import(z.get_mpz_t(), limbs.size(), -1, sizeof(mp_limb_t), 0, 0, limbs.data());
    return z;
  }

  std::vector<BigCount> unpack(const BigCount& z, std::uint64_t first_slot, std::size_t count) const {
    const std::size_t total_slots = first_slot + count;
    std::vector<mp_limb_t> limbs(std::max<std::size_t>(total_slots * slot_limbs_, mpz_size(z.get_mpz_t())), 0);
    mpz_export(limbs.data(), nullptr, -1, sizeof(mp_limb_t), 0, 0, z.get_mpz_t());
    std::vector<BigCount> out(count);
    for (std::size_t j = 0; j < count; ++j) {
      mpz_import(out[j].get_mpz_t(), slot_limbs_, -1, sizeof(mp_limb_t), 0, 0,
                 limbs.data() + (first_slot + j) * slot_limbs_);
    }
    return out;
  }

 private:
  std::size_t slot_limbs_;
};

template <typename Work>
void run_partitioned(std::size_t tasks, unsigned threads, Work&& work) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
  if (threads == 1) {
    work(0u, 1u);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back([&, t] { work(t, threads); });
}

}  // namespace

CountTable extend_table(std::span<const CountTable* const> previous, const BuildOptions& options) {
  const std::uint64_t n = previous.size();
  if (n == 0) return CountTable::empty_list();
  for (std::uint64_t j = 0; j < n; ++j) {
    if (previous[j] == nullptr || previous[j]->n() != j) {
      throw std::invalid_argument("extend_table: missing table for n = " + std::to_string(j));
    }
  }
  const SupportBounds bounds = support_bounds(n);
  const std::uint64_t width = bounds.M_n - bounds.m_n + 1;
  const auto terms = split_terms(n, options.omit_interleaving);
  const unsigned threads = std::max(1u, options.threads);

  std::vector<BigCount> counts;
  if (options.convolution == Convolution::schoolbook) {
    std::vector<std::vector<BigCount>> partial(std::min<std::size_t>(threads, terms.size()));
    run_partitioned(terms.size(), threads, [&](unsigned t, unsigned stride) {
      auto& acc = partial[t];
      acc.assign(width, BigCount());
      for (std::size_t j = t; j < terms.size(); j += stride) {
        const auto k = terms[j].k;
        schoolbook_accumulate(acc, bounds.m_n, *previous[k - 1], *previous[n - k], terms[j].factor, n - 1);
      }
    });
    counts = std::move(partial.front());
    for (std::size_t t = 1; t < partial.size(); ++t) {
      for (std::uint64_t i = 0; i < width; ++i) counts[i] += partial[t][i];
    }
  } else {
    // Every coefficient of every partial sum is at most n!.
    const std::size_t slot_bits = mpz_sizeinbase(factorial(n).get_mpz_t(), 2) + 2;
    const PackedSequence packing((slot_bits + GMP_LIMB_BITS - 1) / GMP_LIMB_BITS);
    std::vector<BigCount> partial(std::min<std::size_t>(threads, terms.size()));
    run_partitioned(terms.size(), threads, [&](unsigned t, unsigned stride) {
      for (std::size_t j = t; j < terms.size(); j += stride) {
        const auto& left = *previous[terms[j].k - 1];
        const auto& right = *previous[n - terms[j].k];
        const BigCount a = packing.pack(left.counts(), left.min_cost(), terms[j].factor);
        const BigCount b = packing.pack(right.counts(), right.min_cost(), BigCount(1));
        mpz_addmul(partial[t].get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      }
    });
    BigCount acc;
    for (const auto& p : partial) acc += p;
    // slot s holds the count for i = s + (n - 1)
    counts = packing.unpack(acc, bounds.m_n - (n - 1), width);
  }
  return CountTable(n, bounds.m_n, std::move(counts));
}

CountTable extend_table(std::span<const CountTable> previous, const BuildOptions& options) {
  std::vector<const CountTable*> ptrs;
  ptrs.reserve(previous.size());
  for (const auto& t : previous) ptrs.push_back(&t);
  return extend_table(std::span<const CountTable* const>(ptrs), options);
}

std::vector<CountTable> build_tables(std::uint64_t n_max, const BuildOptions& options) {
  std::vector<CountTable> tables;
  tables.reserve(n_max + 1);
  for (std::uint64_t n = 0; n <= n_max; ++n) tables.push_back(extend_table(std::span<const CountTable>(tables), options));
  return tables;
}

// ------------------------------------------------------------ brute force

std::uint64_t quicksort_comparisons(std::span<const int> items) {
  if (items.size() <= 1) return 0;
  const int pivot = items.front();
  std::vector<int> below, above;
  for (auto v : items.subspan(1)) (v < pivot ? below : above).push_back(v);
  return items.size() - 1 + quicksort_comparisons(below) + quicksort_comparisons(above);
}

CountTable brute_force_counts(std::uint64_t n, std::uint64_t cap) {
  if (n > cap) {
    throw std::invalid_argument("brute_force_counts: n = " + std::to_string(n) + " exceeds the enumeration cap " +
                                std::to_string(cap));
  }
  const SupportBounds bounds = support_bounds(n);
  std::vector<unsigned long> tally(bounds.M_n + 1, 0);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    ++tally[quicksort_comparisons(perm)];
  } while (std::next_permutation(perm.begin(), perm.end()));

  auto first = std::find_if(tally.begin(), tally.end(), [](auto c) { return c != 0; });
  const auto min_cost = static_cast<std::uint64_t>(first - tally.begin());
  std::vector<BigCount> counts;
  for (auto it = first; it != tally.end(); ++it) counts.emplace_back(*it);
  while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
  return CountTable(n, min_cost, std::move(counts));
}

// ------------------------------------------------------------------ windows

Rational cdf_window(const CountTable& table, const Rational& y, const Rational& z) {
  if (!(y < z)) throw std::invalid_argument("cdf_window requires y < z");
  const Rational center = expected_comparisons(table.n());
  const Rational n(static_cast<unsigned long>(table.n()));
  const BigCount first = floor(Rational(center + n * y)) + 1;
  const BigCount last = floor(Rational(center + n * z));
  if (last < first || last < 0) return 0;
  const auto clip = [](const BigCount& v) {
    return v.fits_slong_p() ? v.get_si() : (sgn(v) < 0 ? std::numeric_limits<long>::min() : std::numeric_limits<long>::max());
  };
  Rational mass(table.range_sum(clip(first), clip(last)), table.total());
  mass.canonicalize();
  return mass;
}

void validate_table(const CountTable& table) {
  const auto n = table.n();
  const auto where = " (n = " + std::to_string(n) + ")";
  const BigCount fact = factorial(n);
  if (table.total() != fact) {
    throw TableInvariantError("mass check failed: sum of counts " + to_string(table.total()) + " != " + to_string(fact) +
                              where);
  }
  const SupportBounds b = support_bounds(n);
  if (table.min_cost() != b.m_n || table.max_cost() != b.M_n) {
    throw TableInvariantError("support window [" + std::to_string(table.min_cost()) + ", " +
                              std::to_string(table.max_cost()) + "] != [" + std::to_string(b.m_n) + ", " +
                              std::to_string(b.M_n) + "]" + where);
  }
  for (std::size_t j = 0; j < table.counts().size(); ++j) {
    if (sgn(table.counts()[j]) <= 0) {
      throw TableInvariantError("support check failed: N(n, " + std::to_string(table.min_cost() + j) + ") = 0" + where);
    }
  }
  const Rational expected = expected_comparisons(n);
  if (table.mean() != expected) {
    throw TableInvariantError("mean check failed: " + to_string(table.mean()) + " != " + to_string(expected) + where);
  }
}

}  // namespace qslimit
