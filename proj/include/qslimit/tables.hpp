// Exact distribution of the number of key comparisons C_n made by Quicksort
// (first element as pivot) on a uniformly random permutation of n items.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>
#include <deque>

#include "qslimit/numerics.hpp"

namespace qslimit {

/// Smallest and largest possible comparison counts for n items.
struct SupportBounds {
  std::uint64_t n = 0;
  std::uint64_t k = 0;       ///< floor(log2(n + 1))
  std::uint64_t m_n = 0;     ///< total path length of the complete binary tree on n nodes
  std::uint64_t M_n = 0;     ///< n(n-1)/2
};

/// Closed forms m_n = k(n+1) - 2^(k+1) + 2, M_n = n(n-1)/2.
SupportBounds support_bounds(std::uint64_t n);

/// m_n via m_n = m_{n-1} + floor(log2 n), m_0 = 0. Linear in n.
std::uint64_t min_cost_by_recurrence(std::uint64_t n);

/// Both recurrences for 0..n_max in one pass; index j holds (m_j, M_j).
std::vector<std::pair<std::uint64_t, std::uint64_t>> support_by_recurrence(std::uint64_t n_max);

class TableInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N(n, i) for min_cost <= i <= max_cost; zero elsewhere.
class CountTable {
 public:
  CountTable(std::uint64_t n, std::uint64_t min_cost, std::vector<BigCount> counts);

  /// The n = 0 table: N(0, 0) = 1.
  static CountTable empty_list();

  std::uint64_t n() const { return n_; }
  std::uint64_t min_cost() const { return min_cost_; }
  std::uint64_t max_cost() const { return min_cost_ + counts_.size() - 1; }
  const std::vector<BigCount>& counts() const { return counts_; }
  /// N(n, i), zero outside the stored window.
  BigCount count(std::int64_t i) const;
  const BigCount& total() const { return total_; }

  /// Sum_i i N(n,i) / n!
  Rational mean() const;
  /// Exact Var(C_n).
  Rational variance() const;

  /// Sum of N(n, i) over first <= i <= last (clipped to the window).
  BigCount range_sum(std::int64_t first, std::int64_t last) const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  std::uint64_t n_;
  std::uint64_t min_cost_;
  std::vector<BigCount> counts_;
  BigCount total_;
};

BigCount factorial(std::uint64_t n);
BigCount binomial(std::uint64_t n, std::uint64_t k);

/// H_n = 1 + 1/2 + ... + 1/n, H_0 = 0.
Rational harmonic(std::uint64_t n);

/// E C_n = 2(n+1) H_n - 4n.
Rational expected_comparisons(std::uint64_t n);

enum class Convolution {
  schoolbook,  ///< pairwise multiply-accumulate, O(n^5) per level
  kronecker,   ///< pack each sequence into one integer and multiply once
};

struct BuildOptions {
  Convolution convolution = Convolution::schoolbook;
  unsigned threads = 1;
  /// Drops the interleaving factor binom(n-1, k-1). Produces wrong tables;
  /// exists only so verification can demonstrate that it catches the error.
  bool omit_interleaving = false;
};

/// N(n, .) from the tables for 0..n-1, where n = previous.size():
///   N(n, i) = sum_k binom(n-1, k-1) sum_l N(k-1, l) N(n-k, i-(n-1)-l).
/// previous[j] must be the table for j.
CountTable extend_table(std::span<const CountTable* const> previous, const BuildOptions& options = {});
CountTable extend_table(std::span<const CountTable> previous, const BuildOptions& options = {});

/// Tables for 0..n_max in order.
std::vector<CountTable> build_tables(std::uint64_t n_max, const BuildOptions& options = {});

inline constexpr std::uint64_t kBruteForceCap = 9;

/// Counts by running first-element-pivot Quicksort on all n! permutations.
CountTable brute_force_counts(std::uint64_t n, std::uint64_t cap = kBruteForceCap);

/// Comparisons made by first-element-pivot Quicksort on `items`.
std::uint64_t quicksort_comparisons(std::span<const int> items);

/// F_n(z) - F_n(y) = (1/n!) sum N(n, i) over E C_n + n y < i <= E C_n + n z.
Rational cdf_window(const CountTable& table, const Rational& y, const Rational& z);

/// Throws TableInvariantError unless mass, mean and support all hold.
void validate_table(const CountTable& table);

/// Incrementally built, optionally disk-cached sequence of tables.
/// Thread-safe; returned references stay valid for the store's lifetime.
class TableStore {
 public:
  using Warning = std::function<void(const std::string&)>;

  explicit TableStore(BuildOptions options = {}, std::optional<std::filesystem::path> cache_dir = std::nullopt,
                      Warning warn = {});

  const CountTable& get(std::uint64_t n);
  std::uint64_t available() const;
  const BuildOptions& options() const { return options_; }
  const std::optional<std::filesystem::path>& cache_dir() const { return cache_dir_; }

  /// Levels read from cache / computed since construction.
  std::uint64_t loaded_from_cache() const { return loaded_; }
  std::uint64_t computed() const { return computed_; }

 private:
  BuildOptions options_;
  std::optional<std::filesystem::path> cache_dir_;
  Warning warn_;
  mutable std::mutex mutex_;
  std::deque<CountTable> tables_;
  std::vector<const CountTable*> index_;
  std::uint64_t loaded_ = 0;
  std::uint64_t computed_ = 0;
};

// Cache records: one JSON document per n.
inline constexpr int kCacheFormatVersion = 1;

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t n);
std::string serialize_table(const CountTable& table);
/// Parses and validates a cache record; throws TableInvariantError on any mismatch.
CountTable deserialize_table(const std::string& text, std::uint64_t expected_n);

}  // namespace qslimit
