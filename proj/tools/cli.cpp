#include "qslimit/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qslimit/density.hpp"
#include "qslimit/envelope.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/sampler.hpp"
#include "qslimit/synthetic.hpp"
#include "qslimit/tables.hpp"

namespace qslimit {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Levels this small build in well under a second; the guard ignores them.
constexpr std::uint64_t kGuardFreeLevel = 40;
constexpr std::uint64_t kMaxDensityPoints = 10'000'000;

struct Options {
  std::string preset = "paper";
  std::optional<std::string> K, Ktilde, c;
  std::uint64_t seed = 1;
  std::uint64_t max_level = Budget{}.max_level;
  std::uint64_t max_outer = Budget{}.max_outer_loops;
  std::string schedule = "linear";
  std::optional<std::string> format;
  std::optional<std::string> cache_dir;
  bool no_cache = false;
  unsigned threads = 1;
  std::string convolution = "schoolbook";
  double max_build_seconds = 120.0;
};

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Json enclosure_json(const Enclosure& e) {
  Json j;
  j["mid"] = e.mid();
  j["width"] = e.width();
  return j;
}

std::string radical_string(const Radical& r) {
  if (r.exact()) return to_string(*r.exact());
  return "(" + to_string(r.radicand()) + ")^(1/" + std::to_string(r.index()) + ")";
}

std::string format_of(const Options& o, const char* fallback) {
  const std::string f = o.format.value_or(fallback);
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

ConstantSet constants_of(const Options& o) {
  const bool any = o.K || o.Ktilde || o.c;
  if (o.preset == "paper") {
    if (any) throw UsageError("--K, --Ktilde and --c require --preset custom");
    return ConstantSet::paper();
  }
  if (!o.K || !o.Ktilde || !o.c) throw UsageError("--preset custom requires --K, --Ktilde and --c");
  return ConstantSet::custom(parse_rational(*o.K), parse_rational(*o.Ktilde), parse_rational(*o.c));
}

BuildOptions build_options_of(const Options& o) {
  if (o.threads == 0) throw UsageError("--threads must be at least 1");
  BuildOptions b;
  b.threads = o.threads;
  b.convolution = o.convolution == "kronecker" ? Convolution::kronecker : Convolution::schoolbook;
  return b;
}

void guard_build(const Options& o, const BuildOptions& build, const std::optional<fs::path>& dir,
                 std::uint64_t n_max) {
  if (n_max <= kGuardFreeLevel) return;
  std::vector<std::uint64_t> missing;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    if (!dir || !fs::exists(cache_path(*dir, n))) missing.push_back(n);
  }
  if (missing.empty() || missing.back() <= kGuardFreeLevel) return;
  const double estimate = estimate_build_seconds(missing, build);
  if (estimate > o.max_build_seconds) {
    throw UsageError("building count tables up to n = " + std::to_string(n_max) + " would take about " +
                     num(std::round(estimate)) + " s, over the --max-build-seconds limit of " +
                     num(o.max_build_seconds) + " s");
  }
}

std::shared_ptr<TableStore> open_store(const Options& o, std::ostream& err, std::uint64_t n_max) {
  const BuildOptions build = build_options_of(o);
  const auto dir = resolve_cache_dir(o.cache_dir, o.no_cache);
  guard_build(o, build, dir, n_max);
  return std::make_shared<TableStore>(build, dir, [&err](const std::string& w) { err << "warning: " << w << '\n'; });
}

// ---- table -----------------------------------------------------------------

int cmd_table(const Options& o, std::uint64_t n_max, std::ostream& out, std::ostream& err) {
  if (n_max < 1) throw UsageError("table needs n >= 1");
  const std::string format = format_of(o, "csv");
  auto store = open_store(o, err, n_max);
  for (std::uint64_t n = 1; n <= n_max; ++n) store->get(n);  // build and validate before emitting anything

  if (format == "csv") out << "n,i,count\n";
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const CountTable& t = store->get(n);
    validate_table(t);
    if (format == "csv") {
      for (std::size_t j = 0; j < t.counts().size(); ++j) {
        out << n << ',' << t.min_cost() + j << ',' << to_string(t.counts()[j]) << '\n';
      }
      continue;
    }
    Json row;
    row["n"] = n;
    row["m_n"] = t.min_cost();
    row["M_n"] = t.min_cost() + t.counts().size() - 1;
    row["total"] = to_string(t.total());
    row["mean"] = to_string(t.mean());
    Json counts = Json::array();
    for (const auto& c : t.counts()) counts.push_back(to_string(c));
    row["counts"] = std::move(counts);
    out << row.dump() << '\n';
  }
  return kExitOk;
}

// ---- density ---------------------------------------------------------------

int cmd_density(const Options& o, std::uint64_t n, const std::string& xmin_s, const std::string& xmax_s,
                const std::string& step_s, std::ostream& out, std::ostream& err) {
  if (n < 1) throw UsageError("density needs n >= 1");
  const std::string format = format_of(o, "csv");
  const Rational xmin = parse_rational(xmin_s), xmax = parse_rational(xmax_s), step = parse_rational(step_s);
  if (xmin > xmax) throw UsageError("--xmin must not exceed --xmax");
  if (sgn(step) <= 0) throw UsageError("--step must be positive");
  const Rational span = (xmax - xmin) / step;
  if (span > Rational(static_cast<unsigned long>(kMaxDensityPoints))) {
    throw UsageError("grid would have more than " + std::to_string(kMaxDensityPoints) + " points");
  }
  const ConstantSet consts = constants_of(o);
  auto store = open_store(o, err, n);
  const CountTable& table = store->get(n);
  const Enclosure R = remainder_bound(consts, n);

  if (format == "csv") out << "x,f_n,f_n_width,R_n,R_n_width\n";
  // Half-open grid [xmin, xmax).
  for (Rational x = xmin; x < xmax; x += step) {
    const DensityEstimate e = fn_eval(table, consts, x);
    const Enclosure v = e.value();
    if (format == "csv") {
      out << num(x.get_d()) << ',' << num(v.mid()) << ',' << num(v.width()) << ',' << num(R.mid()) << ','
          << num(R.width()) << '\n';
      continue;
    }
    Json row;
    row["n"] = n;
    row["x"] = to_string(x);
    row["f_n"] = enclosure_json(v);
    row["window_mass"] = to_string(e.window_mass);
    row["R_n"] = enclosure_json(R);
    out << row.dump() << '\n';
  }
  return kExitOk;
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string target = "synthetic";
  std::uint64_t count = 1;
  std::string shape = "triangular";
  std::string amplitude = "1";
  double rate = 0.5;
  std::string uniform = "dyadic53";
};

Json point_json(const ScaledRadical& x) {
  Json j;
  if (const auto exact = x.exact()) {
    j["exact"] = to_string(*exact);
  } else {
    j["scale"] = radical_string(x.scale);
    j["ratio"] = to_string(x.ratio);
  }
  return j;
}

Json quicksort_diagnosis(const ConstantSet& consts, std::uint64_t level) {
  const Enclosure R = remainder_bound(consts, level);
  const Enclosure inv_delta = delta_n(consts, level).reciprocal();
  const BigCount first = first_level_below(consts, consts.K);
  Json d;
  d["level"] = level;
  d["R_level"] = enclosure_json(R);
  d["inv_delta_level"] = enclosure_json(inv_delta);
  d["K"] = to_string(consts.K);
  d["first_decidable_level"] = to_string(first);
  d["message"] = "R_" + std::to_string(level) + " ~ " + num(std::round(R.mid() * 100) / 100) +
                 " exceeds both K = " + to_string(consts.K) + " (the largest threshold T = U g(X)) and 1/delta_" +
                 std::to_string(level) + " ~ " + num(std::round(inv_delta.mid() * 100) / 100) +
                 " (the largest f_n), so |T - f_n(X)| >= R_n cannot be certified; no decision is possible before n = " +
                 to_string(first) + ", the first level with R_n < K";
  return d;
}

int cmd_sample(const Options& o, const SampleArgs& a, std::ostream& out, std::ostream& err) {
  if (o.max_level == 0 || o.max_outer == 0) throw UsageError("--max-level and --max-outer must be positive");
  if (o.format && *o.format != "json") throw UsageError("sample emits JSON lines only");

  SamplerOptions so;
  so.budget = {o.max_level, o.max_outer};
  so.schedule = o.schedule == "geometric" ? LevelSchedule::geometric : LevelSchedule::linear;
  so.uniform = a.uniform == "lazy" ? UniformMode::lazy : UniformMode::dyadic53;

  const bool quicksort = a.target != "synthetic";
  std::optional<ConstantSet> consts;
  std::optional<TargetSpec> target;
  if (quicksort) {
    if (a.target == "quicksort-paper" && o.preset != "paper") throw UsageError("quicksort-paper needs --preset paper");
    if (a.target == "quicksort-custom" && o.preset != "custom") throw UsageError("quicksort-custom needs --preset custom");
    consts = constants_of(o);
    target = make_quicksort_target(*consts, open_store(o, err, o.max_level));
    if (!target->perfect()) {
      err << "warning: custom constants carry no proof that |f_n - f| <= R_n or f <= g; samples are not certified\n";
    }
  } else {
    if (o.K || o.Ktilde || o.c) throw UsageError("--K, --Ktilde and --c apply to quicksort targets only");
    target = make_synthetic_target(parse_synthetic_shape(a.shape), ErrorSchedule{parse_rational(a.amplitude), a.rate});
  }

  Json run;
  run["type"] = "run";
  run["seed"] = o.seed;
  run["target"] = to_string(target->label);
  run["perfect"] = target->perfect();
  if (quicksort) {
    run["preset"] = o.preset;
    run["K"] = to_string(consts->K);
    run["Ktilde"] = to_string(consts->Ktilde);
    run["c"] = to_string(consts->c);
  } else {
    run["shape"] = a.shape;
    run["amplitude"] = to_string(parse_rational(a.amplitude));
    run["rate"] = a.rate;
  }
  run["schedule"] = o.schedule;
  run["uniform"] = a.uniform;
  run["max_level"] = o.max_level;
  run["max_outer_loops"] = o.max_outer;
  run["count"] = a.count;
  out << run.dump() << '\n';

  UniformStream rng(o.seed);
  BatchSummary s;
  s.requested = a.count;
  std::uint64_t last_exhausted_level = 0;
  for (std::uint64_t j = 0; j < a.count; ++j) {
    const SampleOutcome outcome = perfect_sample(*target, rng, so);
    const Diagnostics& d = outcome.diagnostics;
    s.total_outer_loops += d.outer_loops;
    s.max_level_reached = std::max(s.max_level_reached, d.max_level_reached);
    s.oracle_evals += d.oracle_evals;
    s.indeterminate_refinements += d.indeterminate_refinements;

    Json row;
    row["type"] = "sample";
    row["index"] = j;
    if (outcome.ok()) {
      ++s.accepted;
      row["status"] = "accepted";
      row["value"] = outcome.value;
      row["point"] = point_json(*outcome.accepted);
    } else {
      ++s.exhausted;
      const ExhaustionReport& r = *outcome.exhaustion;
      row["status"] = "exhausted";
      row["reason"] = to_string(r.reason);
      if (r.reason == ExhaustionReason::max_level) {
        last_exhausted_level = r.level;
        row["level"] = r.level;
        row["threshold"] = {{"lo", to_string(r.threshold_lo)}, {"hi", to_string(r.threshold_hi)}};
        if (r.estimate) row["estimate"] = enclosure_json(*r.estimate);
        if (r.error_bound) row["error_bound"] = enclosure_json(*r.error_bound);
      }
    }
    row["outer_loops"] = d.outer_loops;
    row["max_level"] = d.max_level_reached;
    row["oracle_evals"] = d.oracle_evals;
    out << row.dump() << '\n';
  }

  Json summary;
  summary["type"] = "summary";
  summary["seed"] = o.seed;
  summary["target"] = to_string(target->label);
  summary["requested"] = s.requested;
  summary["accepted"] = s.accepted;
  summary["exhausted"] = s.exhausted;
  summary["total_outer_loops"] = s.total_outer_loops;
  summary["acceptance_rate"] = s.acceptance_rate();
  summary["mean_outer_loops"] = s.mean_outer_loops();
  summary["envelope_mass"] = enclosure_json(envelope_mass(target->envelope));
  summary["max_level_reached"] = s.max_level_reached;
  summary["oracle_evals"] = s.oracle_evals;
  summary["indeterminate_refinements"] = s.indeterminate_refinements;
  if (quicksort && last_exhausted_level > 0) summary["diagnosis"] = quicksort_diagnosis(*consts, last_exhausted_level);
  out << summary.dump() << '\n';

  if (quicksort && last_exhausted_level > 0) err << "note: " << summary["diagnosis"]["message"].get<std::string>() << '\n';
  return a.count > 0 && s.accepted == 0 ? kExitExhausted : kExitOk;
}

// ---- moments ---------------------------------------------------------------

int cmd_moments(const Options& o, unsigned max_order, std::ostream& out) {
  constexpr unsigned kOrderCap = 12;
  if (max_order > kOrderCap) throw UsageError("--max-order is capped at " + std::to_string(kOrderCap));
  const std::string format = format_of(o, "csv");
  const MomentTable table(max_order);
  if (format == "csv") out << "p,m_p,error\n";
  for (unsigned p = 0; p <= max_order; ++p) {
    if (format == "csv") {
      out << p << ',' << num(table[p].value) << ',' << num(table[p].error) << '\n';
      continue;
    }
    Json row;
    row["p"] = p;
    row["m_p"] = table[p].value;
    row["error"] = table[p].error;
    out << row.dump() << '\n';
  }
  return kExitOk;
}

// ---- constants -------------------------------------------------------------

int cmd_constants(const Options& o, std::uint64_t n, std::ostream& out) {
  if (n < 1) throw UsageError("constants needs --n >= 1");
  const std::string format = format_of(o, "csv");
  const ConstantSet consts = constants_of(o);
  const EnvelopeSpec g = EnvelopeSpec::from_constants(consts);

  struct Entry {
    std::string name;
    Enclosure value;
    std::string exact;
  };
  auto rational = [](const std::string& name, const Rational& q) { return Entry{name, Enclosure(q, kDefaultPrecision), to_string(q)}; };
  auto radical = [](const std::string& name, const Radical& r) { return Entry{name, r.enclose(), radical_string(r)}; };
  const BigCount first = first_level_below(consts, consts.K);
  const std::vector<Entry> entries{
      rational("K", consts.K),
      rational("Ktilde", consts.Ktilde),
      rational("c", consts.c),
      radical("chat", consts.chat()),
      radical("delta_n", delta_radical(consts, n)),
      radical("R_n", remainder_radical(consts, n)),
      radical("C", g.tail_coefficient()),
      radical("a", g.crossover()),
      radical("mass", g.mass()),
      {"xi", g.xi(), "1/" + radical_string(g.mass())},
      {"first_decidable_level", Enclosure(Rational(first), kDefaultPrecision), to_string(first)},
  };

  if (format == "csv") {
    out << "name,value,width,exact\n";
    out << "provenance,,," << to_string(consts.provenance) << '\n';
    out << "n,,," << n << '\n';
    for (const auto& e : entries) {
      out << e.name << ',' << num(e.value.mid()) << ',' << num(e.value.width()) << ',' << e.exact << '\n';
    }
    return kExitOk;
  }
  Json j;
  j["provenance"] = to_string(consts.provenance);
  j["n"] = n;
  for (const auto& e : entries) {
    Json v = enclosure_json(e.value);
    v["exact"] = e.exact;
    j[e.name] = std::move(v);
  }
  out << j.dump() << '\n';
  return kExitOk;
}

// ---- support ---------------------------------------------------------------

int cmd_support(const Options& o, std::uint64_t n, std::optional<std::uint64_t> from, std::ostream& out) {
  const std::string format = format_of(o, "csv");
  const std::uint64_t first = from.value_or(n);
  if (first > n) throw UsageError("--from must not exceed n");
  if (format == "csv") out << "n,m_n,M_n\n";
  for (std::uint64_t m = first; m <= n; ++m) {
    const SupportBounds b = support_bounds(m);
    if (format == "csv") {
      out << m << ',' << b.m_n << ',' << b.M_n << '\n';
      continue;
    }
    Json row;
    row["n"] = m;
    row["m_n"] = b.m_n;
    row["M_n"] = b.M_n;
    out << row.dump() << '\n';
  }
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
  Json mismatch;  // first differing entry, if any
};

int cmd_verify(const Options& o, std::uint64_t n_max, bool inject_fault, std::ostream& out, std::ostream& err) {
  const std::string format = format_of(o, "csv");
  BuildOptions build = build_options_of(o);
  guard_build(o, build, std::nullopt, n_max);

  // Tables are rebuilt from scratch so the recursion itself is checked, not a cache.
  std::vector<CountTable> tables = build_tables(n_max, build);
  if (inject_fault) {
    BuildOptions broken = build;
    broken.omit_interleaving = true;
    std::vector<CountTable> faulty{tables[0]};
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      faulty.push_back(extend_table(std::span<const CountTable>(tables.data(), n), broken));
    }
    tables = std::move(faulty);
    err << "warning: verifying tables built without the interleaving factor (fault injection)\n";
  }

  std::vector<CheckResult> results;
  constexpr std::size_t kListed = 3;

  {
    CheckResult r{"oracle", true, "", nullptr};
    const std::uint64_t top = std::min<std::uint64_t>(n_max, kBruteForceCap - 1);
    for (std::uint64_t n = 0; n <= top && r.pass; ++n) {
      const CountTable brute = brute_force_counts(n);
      const CountTable& t = tables[n];
      const auto bounds = support_bounds(n);
      for (std::uint64_t i = 0; i <= bounds.M_n + 1; ++i) {
        const auto idx = static_cast<std::int64_t>(i);
        if (t.count(idx) != brute.count(idx)) {
          r.pass = false;
          r.detail = "n=" + std::to_string(n) + " i=" + std::to_string(i) + ": recursion " + to_string(t.count(idx)) +
                     ", brute force " + to_string(brute.count(idx));
          r.mismatch = {{"n", n}, {"i", i}, {"expected", to_string(brute.count(idx))}, {"actual", to_string(t.count(idx))}};
          break;
        }
      }
    }
    if (r.pass) r.detail = "recursion equals brute force for n <= " + std::to_string(top);
    results.push_back(std::move(r));
  }

  auto per_level = [&](const std::string& name, auto&& check) {
    CheckResult r{name, true, "", nullptr};
    std::size_t listed = 0, failures = 0;
    for (std::uint64_t n = 0; n <= n_max; ++n) {
      std::string why;
      if (check(n, why)) continue;
      ++failures;
      if (r.pass) r.mismatch = {{"n", n}, {"detail", why}};
      r.pass = false;
      if (listed++ < kListed) r.detail += (r.detail.empty() ? "" : "; ") + ("n=" + std::to_string(n) + ": " + why);
    }
    if (failures > kListed) r.detail += "; " + std::to_string(failures - kListed) + " more";
    if (r.pass) r.detail = "holds for n <= " + std::to_string(n_max);
    results.push_back(std::move(r));
  };

  per_level("mass", [&](std::uint64_t n, std::string& why) {
    const BigCount expected = factorial(n);
    if (tables[n].total() == expected) return true;
    why = "sum " + to_string(tables[n].total()) + " != " + to_string(expected);
    return false;
  });
  per_level("mean", [&](std::uint64_t n, std::string& why) {
    if (sgn(tables[n].total()) == 0) {
      why = "empty table";
      return false;
    }
    const Rational expected = expected_comparisons(n);
    if (tables[n].mean() == expected) return true;
    why = "mean " + to_string(tables[n].mean()) + " != " + to_string(expected);
    return false;
  });
  per_level("support", [&](std::uint64_t n, std::string& why) {
    const auto b = support_bounds(n);
    const CountTable& t = tables[n];
    for (std::uint64_t i = 0; i <= b.M_n + 1; ++i) {
      const bool positive = sgn(t.count(static_cast<std::int64_t>(i))) > 0;
      if (positive != (b.m_n <= i && i <= b.M_n)) {
        why = "N(n," + std::to_string(i) + ") = " + to_string(t.count(static_cast<std::int64_t>(i))) +
              " outside/inside [" + std::to_string(b.m_n) + ", " + std::to_string(b.M_n) + "]";
        return false;
      }
    }
    return true;
  });
  {
    const auto rec = support_by_recurrence(n_max);
    per_level("support-recurrence", [&](std::uint64_t n, std::string& why) {
      const auto b = support_bounds(n);
      if (b.m_n == rec[n].first && b.M_n == rec[n].second) return true;
      why = "closed form (" + std::to_string(b.m_n) + ", " + std::to_string(b.M_n) + ") vs recurrence (" +
            std::to_string(rec[n].first) + ", " + std::to_string(rec[n].second) + ")";
      return false;
    });
  }

  bool all = true;
  if (format == "csv") out << "check,status,detail\n";
  for (const auto& r : results) {
    all = all && r.pass;
    if (format == "csv") {
      out << r.name << ',' << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
      continue;
    }
    Json row;
    row["check"] = r.name;
    row["status"] = r.pass ? "pass" : "fail";
    row["n_max"] = n_max;
    row["detail"] = r.detail;
    if (!r.pass) row["first_mismatch"] = r.mismatch;
    out << row.dump() << '\n';
  }
  if (!all) {
    for (const auto& r : results) {
      if (!r.pass) {
        err << "verification failed: " << r.name << ": " << r.detail << '\n';
        break;
      }
    }
  }
  return all ? kExitOk : kExitVerifyFailed;
}

double cost_coefficient(Convolution convolution) {
  constexpr std::uint64_t kCalibrationLevel = 32;
  auto fit = [](Convolution conv) {
    BuildOptions b;
    b.convolution = conv;
    const auto start = std::chrono::steady_clock::now();
    build_tables(kCalibrationLevel, b);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double work = 0.0;
    for (std::uint64_t m = 1; m <= kCalibrationLevel; ++m) work += std::pow(static_cast<double>(m), 5);
    return seconds / work;
  };
  static const double schoolbook = fit(Convolution::schoolbook);
  static const double kronecker = fit(Convolution::kronecker);
  return convolution == Convolution::kronecker ? kronecker : schoolbook;
}

}  // namespace

std::optional<fs::path> resolve_cache_dir(const std::optional<std::string>& flag, bool disabled) {
  if (disabled) return std::nullopt;
  if (flag && !flag->empty()) return fs::path(*flag);
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return fs::path(env);
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "qslimit";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "qslimit";
  return std::nullopt;
}

double estimate_build_seconds(const std::vector<std::uint64_t>& levels, const BuildOptions& options) {
  double work = 0.0;
  for (auto n : levels) work += std::pow(static_cast<double>(n), 5);
  // Threads split the pair loop; one core gets no speedup.
  const double speedup = std::max(1u, std::min(options.threads, std::thread::hardware_concurrency()));
  return cost_coefficient(options.convolution) * work / speedup;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact Quicksort comparison-count tables and perfect sampling of the Quicksort limit law", "qslimit"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--preset", o.preset, "Constant set: paper (proven) or custom")
      ->check(CLI::IsMember({"paper", "custom"}))
      ->capture_default_str();
  app.add_option("--K", o.K, "Custom sup f bound (rational, e.g. 16 or 31/2)");
  app.add_option("--Ktilde", o.Ktilde, "Custom sup |f'| bound");
  app.add_option("--c", o.c, "Custom rate constant");
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--max-level", o.max_level, "Largest oracle level n per proposal")->capture_default_str();
  app.add_option("--max-outer", o.max_outer, "Largest number of proposals per sample")->capture_default_str();
  app.add_option("--schedule", o.schedule, "Level schedule")
      ->check(CLI::IsMember({"linear", "geometric"}))
      ->capture_default_str();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--cache-dir", o.cache_dir, std::string("Table cache directory (overrides $") + kCacheDirEnv + ")");
  app.add_flag("--no-cache", o.no_cache, "Do not read or write the table cache");
  app.add_option("--threads", o.threads, "Threads for table building")->capture_default_str();
  app.add_option("--convolution", o.convolution, "Polynomial product used in table building")
      ->check(CLI::IsMember({"schoolbook", "kronecker"}))
      ->capture_default_str();
  app.add_option("--max-build-seconds", o.max_build_seconds, "Refuse table builds predicted to take longer")
      ->capture_default_str();

  std::uint64_t n = 0;
  auto* table = app.add_subcommand("table", "Emit N(n, i) for every level 1..n");
  table->add_option("n", n, "Largest level")->required();

  std::string xmin = "-3", xmax = "3", step = "1/100";
  auto* density = app.add_subcommand("density", "Emit the curve (x, f_n(x), R_n) on [xmin, xmax)");
  density->add_option("n", n, "Level")->required();
  density->add_option("--xmin", xmin, "Left end (rational)")->capture_default_str();
  density->add_option("--xmax", xmax, "Right end, excluded (rational)")->capture_default_str();
  density->add_option("--step", step, "Grid step (rational)")->capture_default_str();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw samples; emits JSON lines and a summary");
  sample->add_option("--target", sa.target, "quicksort (per --preset), quicksort-paper, quicksort-custom or synthetic")
      ->check(CLI::IsMember({"quicksort", "quicksort-paper", "quicksort-custom", "synthetic"}))
      ->capture_default_str();
  sample->add_option("--count", sa.count, "Number of samples")->capture_default_str();
  sample->add_option("--shape", sa.shape, "Synthetic density")
      ->check(CLI::IsMember({"triangular", "truncated-quadratic"}))
      ->capture_default_str();
  sample->add_option("--amplitude", sa.amplitude, "Synthetic error amplitude A in R_n = A n^-rate")
      ->capture_default_str();
  sample->add_option("--rate", sa.rate, "Synthetic error decay rate")->capture_default_str();
  sample->add_option("--uniform", sa.uniform, "Threshold uniform: exact 53-bit dyadic or lazily refined")
      ->check(CLI::IsMember({"dyadic53", "lazy"}))
      ->capture_default_str();

  unsigned max_order = 4;
  auto* moments = app.add_subcommand("moments", "Emit moments m_p of the limit law");
  moments->add_option("--max-order", max_order, "Largest order p")->capture_default_str();

  std::uint64_t level = 1;
  auto* constants = app.add_subcommand("constants", "Emit K, Ktilde, c, chat, delta_n, R_n, envelope mass and xi");
  constants->add_option("--n", level, "Level for delta_n and R_n")->capture_default_str();

  std::optional<std::uint64_t> from;
  auto* support = app.add_subcommand("support", "Emit the support bounds m_n, M_n");
  support->add_option("n", n, "Level")->required();
  support->add_option("--from", from, "Emit every level from this one up to n");

  bool inject = false;
  auto* verify = app.add_subcommand("verify", "Check tables against brute force and the exact invariants");
  verify->add_option("n_max", n, "Largest level")->required();
  verify->add_flag("--inject-uncorrected-recursion", inject)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*table) return cmd_table(o, n, out, err);
    if (*density) return cmd_density(o, n, xmin, xmax, step, out, err);
    if (*sample) return cmd_sample(o, sa, out, err);
    if (*moments) return cmd_moments(o, max_order, out);
    if (*constants) return cmd_constants(o, level, out);
    if (*support) return cmd_support(o, n, from, out);
    if (*verify) return cmd_verify(o, n, inject, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TableInvariantError& e) {
    err << "error: table invariant violated: " << e.what() << '\n';
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qslimit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qslimit
