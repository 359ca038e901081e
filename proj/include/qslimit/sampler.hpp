// Rejection sampling with a convergent sequence of certified density
// approximations.
//
// Each outer round draws X from the normalized envelope and T = U g(X). The
// inner loop asks the oracle for (Y, R) = (f_n(X), R_n) at increasing levels
// n until |T - Y| >= R is certified; X is accepted iff T <= Y - R. Because
// |Y - f(X)| <= R, the decision agrees with the ideal test T <= f(X), so
// accepted values follow f exactly whenever the oracle's certificate and the
// envelope's domination hold.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/density.hpp"
#include "qslimit/envelope.hpp"
#include "qslimit/tables.hpp"
#include "qslimit/uniform.hpp"

namespace qslimit {

struct OracleReply {
  Enclosure estimate;     ///< encloses f_n(x)
  Enclosure error_bound;  ///< encloses R_n
};

/// Supplies (f_n(x), R_n) with |f_n(x) - f(x)| <= R_n, R_n nonincreasing in n.
/// Larger `precision` must not produce wider enclosures.
class ApproximationOracle {
 public:
  virtual ~ApproximationOracle() = default;
  virtual OracleReply eval(std::uint64_t level, const ScaledRadical& x, mpfr_prec_t precision) const = 0;
};

class OracleContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class TargetLabel { quicksort_paper, quicksort_custom, synthetic };

std::string to_string(TargetLabel label);

struct TargetSpec {
  EnvelopeSpec envelope;
  std::shared_ptr<const ApproximationOracle> oracle;
  TargetLabel label = TargetLabel::synthetic;

  /// False for targets whose bounds are unproven.
  bool perfect() const { return label != TargetLabel::quicksort_custom; }
};

/// f_n from exact count tables; levels are built on demand.
class QuicksortOracle final : public ApproximationOracle {
 public:
  QuicksortOracle(ConstantSet consts, std::shared_ptr<TableStore> store);
  OracleReply eval(std::uint64_t level, const ScaledRadical& x, mpfr_prec_t precision) const override;
  const ConstantSet& constants() const { return consts_; }

 private:
  ConstantSet consts_;
  std::shared_ptr<TableStore> store_;
};

TargetSpec make_quicksort_target(const ConstantSet& consts, std::shared_ptr<TableStore> store);

enum class LevelSchedule {
  linear,     ///< n <- n + 1
  geometric,  ///< n <- max(n + 1, ceil(1.5 n))
};

enum class UniformMode {
  dyadic53,  ///< U is an exact 53-bit dyadic rational
  lazy,      ///< bits of U are revealed while the decision is unresolved
};

struct Budget {
  std::uint64_t max_level = 1000;
  std::uint64_t max_outer_loops = 100000;
};

struct SamplerOptions {
  Budget budget;
  LevelSchedule schedule = LevelSchedule::linear;
  UniformMode uniform = UniformMode::dyadic53;
  mpfr_prec_t base_precision = kDefaultPrecision;
  mpfr_prec_t max_precision = 1024;
  unsigned max_uniform_bits = 1024;
};

std::uint64_t next_level(LevelSchedule schedule, std::uint64_t level);

struct Diagnostics {
  std::uint64_t outer_loops = 0;
  std::uint64_t max_level_reached = 0;
  std::uint64_t oracle_evals = 0;
  std::uint64_t indeterminate_refinements = 0;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

enum class ExhaustionReason { max_level, max_outer_loops };

std::string to_string(ExhaustionReason reason);

/// State of the last unresolved inner loop when a budget trips.
struct ExhaustionReport {
  ExhaustionReason reason = ExhaustionReason::max_level;
  std::uint64_t level = 0;
  Rational threshold_lo;  ///< T
  Rational threshold_hi;
  std::optional<Enclosure> estimate;
  std::optional<Enclosure> error_bound;
};

struct SampleOutcome {
  std::optional<ScaledRadical> accepted;  ///< empty when a budget tripped
  double value = 0.0;                     ///< accepted point rounded to double
  Diagnostics diagnostics;
  std::optional<ExhaustionReport> exhaustion;

  bool ok() const { return accepted.has_value(); }
};

/// One certified inner-loop exit, reported for post-hoc auditing.
struct DecisionRecord {
  ScaledRadical point;
  Rational threshold_lo;  ///< T (lower end in lazy mode)
  Rational threshold_hi;
  std::uint64_t level = 0;
  Enclosure estimate;
  Enclosure error_bound;
  bool accepted = false;
};

using DecisionObserver = std::function<void(const DecisionRecord&)>;

SampleOutcome perfect_sample(const TargetSpec& target, UniformStream& rng, const SamplerOptions& options = {},
                             const DecisionObserver& observer = {});

struct BatchSummary {
  std::uint64_t requested = 0;
  std::uint64_t accepted = 0;
  std::uint64_t exhausted = 0;
  std::uint64_t total_outer_loops = 0;
  std::uint64_t max_level_reached = 0;
  std::uint64_t oracle_evals = 0;
  std::uint64_t indeterminate_refinements = 0;

  /// Outer rounds per accepted sample (compare ||g||_1).
  double mean_outer_loops() const;
  /// Accepted samples per outer round.
  double acceptance_rate() const;
};

struct BatchResult {
  std::vector<SampleOutcome> outcomes;
  BatchSummary summary;
};

BatchResult batch_sample(const TargetSpec& target, UniformStream& rng, std::uint64_t count,
                         const SamplerOptions& options = {}, const DecisionObserver& observer = {});

}  // namespace qslimit
