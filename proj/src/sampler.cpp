#include "qslimit/sampler.hpp"

#include <algorithm>
#include <limits>

namespace qslimit {

std::string to_string(TargetLabel label) {
  switch (label) {
    case TargetLabel::quicksort_paper: return "quicksort-paper";
    case TargetLabel::quicksort_custom: return "quicksort-custom";
    case TargetLabel::synthetic: return "synthetic";
  }
  return "?";
}

std::string to_string(ExhaustionReason reason) {
  return reason == ExhaustionReason::max_level ? "max_level" : "max_outer_loops";
}

QuicksortOracle::QuicksortOracle(ConstantSet consts, std::shared_ptr<TableStore> store)
    : consts_(std::move(consts)), store_(std::move(store)) {
  if (!store_) throw std::invalid_argument("QuicksortOracle needs a table store");
}

OracleReply QuicksortOracle::eval(std::uint64_t level, const ScaledRadical& x, mpfr_prec_t precision) const {
  const CountTable& table = store_->get(level);
  const DensityBracket bracket = fn_bracket(table, consts_, x, precision);
  return {bracket.value(precision), bracket.error_bound.enclose(precision)};
}

TargetSpec make_quicksort_target(const ConstantSet& consts, std::shared_ptr<TableStore> store) {
  return {EnvelopeSpec::from_constants(consts), std::make_shared<QuicksortOracle>(consts, std::move(store)),
          consts.proven() ? TargetLabel::quicksort_paper : TargetLabel::quicksort_custom};
}

std::uint64_t next_level(LevelSchedule schedule, std::uint64_t level) {
  constexpr auto top = std::numeric_limits<std::uint64_t>::max();
  if (level == top) return top;
  if (schedule == LevelSchedule::linear) return level + 1;
  if (level / 2 >= top / 3) return top;  // saturate
  return std::max(level + 1, level + (level + 1) / 2);
}

double BatchSummary::mean_outer_loops() const {
  return accepted == 0 ? 0.0 : static_cast<double>(total_outer_loops) / static_cast<double>(accepted);
}

double BatchSummary::acceptance_rate() const {
  return total_outer_loops == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total_outer_loops);
}

namespace {

enum class Exit { accept, reject, stay, unresolved };

bool point_equals(const Enclosure& e, const Rational& q) { return e.is_point() && e.contains(q); }

// T in [t_lo, t_hi]; stop when |T - Y| >= R is certified, accept iff T <= Y - R.
Exit decide(const Rational& t_lo, const Rational& t_hi, const Enclosure& y_minus_r, const Enclosure& y_plus_r) {
  const bool t_exact = t_lo == t_hi;
  if (compare_with_enclosure(t_hi, y_minus_r) == Comparison::less || (t_exact && point_equals(y_minus_r, t_hi))) {
    return Exit::accept;
  }
  if (compare_with_enclosure(t_lo, y_plus_r) == Comparison::greater || (t_exact && point_equals(y_plus_r, t_lo))) {
    return Exit::reject;
  }
  if (compare_with_enclosure(t_lo, y_minus_r) == Comparison::greater &&
      compare_with_enclosure(t_hi, y_plus_r) == Comparison::less) {
    return Exit::stay;
  }
  return Exit::unresolved;
}

}  // namespace

SampleOutcome perfect_sample(const TargetSpec& target, UniformStream& rng, const SamplerOptions& options,
                             const DecisionObserver& observer) {
  if (options.budget.max_level == 0 || options.budget.max_outer_loops == 0) {
    throw std::invalid_argument("sampler budgets must be positive");
  }
  if (!target.oracle) throw std::invalid_argument("target has no oracle");
  const EnvelopeSpec& envelope = target.envelope;
  const bool lazy = options.uniform == UniformMode::lazy;

  SampleOutcome out;
  Diagnostics& diag = out.diagnostics;
  for (;;) {
    if (diag.outer_loops >= options.budget.max_outer_loops) {
      out.exhaustion = ExhaustionReport{ExhaustionReason::max_outer_loops, 0, {}, {}, std::nullopt, std::nullopt};
      return out;
    }
    ++diag.outer_loops;

    LazyUniform u(rng, 53);
    const Proposal proposal = sample_proposal(rng);
    const ScaledRadical x = proposal.point(envelope);
    const Rational gx = envelope_density_at_ratio(envelope, proposal.ratio);
    Rational t_lo = u.lower() * gx;
    Rational t_hi = lazy ? Rational(u.upper() * gx) : t_lo;

    std::optional<OracleReply> last;
    std::uint64_t level = 0;
    for (;;) {
      const std::uint64_t candidate = level == 0 ? 1 : next_level(options.schedule, level);
      if (candidate > options.budget.max_level || candidate == level) {
        ExhaustionReport report{ExhaustionReason::max_level, level, t_lo, t_hi, std::nullopt, std::nullopt};
        if (last) {
          report.estimate = last->estimate;
          report.error_bound = last->error_bound;
        }
        out.exhaustion = std::move(report);
        return out;
      }
      level = candidate;
      diag.max_level_reached = std::max(diag.max_level_reached, level);

      mpfr_prec_t precision = options.base_precision;
      OracleReply reply = target.oracle->eval(level, x, precision);
      ++diag.oracle_evals;
      if (mpfr_sgn(reply.error_bound.upper()) < 0) {
        throw OracleContractError("negative error bound at level " + std::to_string(level));
      }
      if (last && mpfr_greater_p(reply.error_bound.lower(), last->error_bound.upper())) {
        throw OracleContractError("error bound increased at level " + std::to_string(level));
      }

      Exit exit = Exit::unresolved;
      for (;;) {
        exit = decide(t_lo, t_hi, reply.estimate - reply.error_bound, reply.estimate + reply.error_bound);
        if (exit != Exit::unresolved) break;
        ++diag.indeterminate_refinements;
        bool refined = false;
        if (lazy && u.bits() < options.max_uniform_bits) {
          u.refine(rng);
          t_lo = u.lower() * gx;
          t_hi = u.upper() * gx;
          refined = true;
        }
        if (precision < options.max_precision) {
          precision = std::min(precision * 2, options.max_precision);
          reply = target.oracle->eval(level, x, precision);
          ++diag.oracle_evals;
          refined = true;
        }
        if (!refined) break;  // give up on this level, try the next one
      }
      last = reply;

      if (exit == Exit::accept || exit == Exit::reject) {
        if (observer) {
          observer(DecisionRecord{x, t_lo, t_hi, level, reply.estimate, reply.error_bound, exit == Exit::accept});
        }
        if (exit == Exit::accept) {
          out.value = x.approx();
          out.accepted = x;
          return out;
        }
        break;
      }
    }
  }
}

BatchResult batch_sample(const TargetSpec& target, UniformStream& rng, std::uint64_t count,
                         const SamplerOptions& options, const DecisionObserver& observer) {
  BatchResult result;
  result.outcomes.reserve(count);
  auto& s = result.summary;
  s.requested = count;
  for (std::uint64_t j = 0; j < count; ++j) {
    auto outcome = perfect_sample(target, rng, options, observer);
    const auto& d = outcome.diagnostics;
    (outcome.ok() ? s.accepted : s.exhausted) += 1;
    s.total_outer_loops += d.outer_loops;
    s.max_level_reached = std::max(s.max_level_reached, d.max_level_reached);
    s.oracle_evals += d.oracle_evals;
    s.indeterminate_refinements += d.indeterminate_refinements;
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

}  // namespace qslimit
