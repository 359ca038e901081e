// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "qslimit/cli.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/synthetic.hpp"

using namespace qslimit;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "FIRST FAILURE: " << what << "; ";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double F = cdf(xs[j]);
    d = std::max({d, std::abs(F - j / n), std::abs((j + 1) / n - F)});
  }
  return d;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) rows.push_back(json::parse(line));
  return rows;
}

const std::vector<CountTable>& tables_to_60() {
  static const std::vector<CountTable> tables = build_tables(60);
  return tables;
}

const std::string kCache = QSLIMIT_ACCEPTANCE_CACHE;

// ---------------------------------------------------------------------------

void oracle_equivalence(Verdict& v) {
  const auto& t = tables_to_60();
  std::uint64_t entries = 0;
  for (std::uint64_t n = 0; n <= 8; ++n) {
    const CountTable brute = brute_force_counts(n);
    for (std::int64_t i = 0; i <= static_cast<std::int64_t>(support_bounds(n).M_n) + 1; ++i, ++entries) {
      v.require(t[n].count(i) == brute.count(i), "N(" + std::to_string(n) + "," + std::to_string(i) + ") differs");
    }
  }
  v.detail << "compared " << entries << " entries for n <= 8 against exhaustive enumeration (40320 permutations at n=8)";
}

void mass_and_mean(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const auto tables = build_tables(60);
  const double elapsed = seconds_since(start);
  for (std::uint64_t n = 0; n <= 60; ++n) {
    v.require(tables[n].total() == factorial(n), "mass at n=" + std::to_string(n));
    if (n >= 1) {
      v.require(tables[n].mean() == Rational(2 * (n + 1) * harmonic(n) - 4 * n), "mean at n=" + std::to_string(n));
    }
  }
  v.require(elapsed < 300.0, "build to n=60 slower than desk scale");
  v.detail << "sum N(n,i) = n! and mean = 2(n+1)H_n - 4n exactly for n <= 60; build took " << elapsed << " s";
}

void support(Verdict& v) {
  const auto& t = tables_to_60();
  for (std::uint64_t n = 0; n <= 60; ++n) {
    const auto b = support_bounds(n);
    for (std::uint64_t i = 0; i <= b.M_n + 1; ++i) {
      const bool positive = sgn(t[n].count(static_cast<std::int64_t>(i))) > 0;
      v.require(positive == (b.m_n <= i && i <= b.M_n), "support at n=" + std::to_string(n));
    }
  }
  const auto rec = support_by_recurrence(1'000'000);
  for (std::uint64_t n = 0; n <= 1'000'000; ++n) {
    const auto b = support_bounds(n);
    if (b.m_n != rec[n].first || b.M_n != rec[n].second) {
      v.require(false, "closed form vs recurrence at n=" + std::to_string(n));
      break;
    }
  }
  v.detail << "N(n,i) > 0 iff m_n <= i <= M_n for n <= 60; closed form equals recurrence for n <= 10^6 (m_1e6 = "
           << support_bounds(1'000'000).m_n << ")";
}

void envelope_mass_check(Verdict& v) {
  const EnvelopeSpec g = EnvelopeSpec::from_constants(ConstantSet::paper());
  const Enclosure mass = envelope_mass(g);
  v.require(mass.lo() >= 134.05 && mass.hi() <= 134.15, "mass enclosure outside 134.1 +/- 0.05");
  const double a = g.crossover_approx();
  const double C = std::sqrt(g.tail_coefficient_sq().get_d());
  const double K = g.K().get_d();
  const double center = boost::math::quadrature::gauss_kronrod<double, 31>::integrate([&](double) { return K; }, 0.0, a);
  boost::math::quadrature::exp_sinh<double> tail_rule;
  const double tail = tail_rule.integrate([&](double x) { return C / (x * x); }, a, std::numeric_limits<double>::infinity());
  const double quadrature = 2 * (center + tail);
  const double rel = std::abs(quadrature - mass.mid()) / mass.mid();
  v.require(rel <= 1e-4, "quadrature cross-check");
  v.detail << "||g||_1 in [" << std::setprecision(17) << mass.lo() << ", " << mass.hi() << "]; quadrature "
           << quadrature << " (relative difference " << std::setprecision(3) << rel << ")";
}

void envelope_sampler(Verdict& v) {
  constexpr std::size_t N = 1'000'000;
  const EnvelopeSpec g = EnvelopeSpec::from_constants(ConstantSet::paper());
  UniformStream rng(20240501);
  std::vector<double> xs(N);
  for (auto& x : xs) x = sample_envelope(g, rng);
  const double a = g.crossover_approx();
  const double left = std::count_if(xs.begin(), xs.end(), [&](double x) { return x < -a; }) / double(N);
  const double right = std::count_if(xs.begin(), xs.end(), [&](double x) { return x > a; }) / double(N);
  const double middle = 1 - left - right;
  const double ks = ks_statistic(xs, [&](double x) { return envelope_cdf(g, x).mid(); });
  const double critical = 1.95 / std::sqrt(double(N));
  v.require(ks < critical, "KS statistic above the 0.1% critical value");
  const double s_tail = 3 * std::sqrt(0.25 * 0.75 / N), s_mid = 3 * std::sqrt(0.25 / N);
  v.require(std::abs(left - 0.25) <= s_tail && std::abs(right - 0.25) <= s_tail && std::abs(middle - 0.5) <= s_mid,
            "tail/center split outside 3 sigma");
  v.detail << "KS " << ks << " < " << critical << " over 10^6 draws; split " << left << " / " << middle << " / "
           << right;
}

void moments_check(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const MomentTable m(4);
  const double elapsed = seconds_since(start);
  const double m2 = 7 - 2 * std::numbers::pi * std::numbers::pi / 3;
  v.require(std::abs(m[2].value - m2) <= 1e-6, "m_2");
  v.require(std::abs(m[4].value - 0.7379) <= 1e-3, "m_4");
  v.detail << std::setprecision(12) << "m_2 = " << m[2].value << " (7 - 2pi^2/3 = " << m2 << "), m_4 = " << m[4].value
           << " in " << std::setprecision(3) << elapsed << " s";
}

void sampler_correctness(Verdict& v) {
  constexpr std::uint64_t N = 100'000;
  const auto shape = SyntheticShape::triangular;
  const auto target = make_synthetic_target(shape, ErrorSchedule{Rational(1), 1.0});
  SamplerOptions options;
  options.schedule = LevelSchedule::geometric;
  options.budget.max_level = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t decisions = 0, violations = 0;
  UniformStream rng(7);
  const auto result = batch_sample(target, rng, N, options, [&](const DecisionRecord& d) {
    ++decisions;
    const Rational f = synthetic_density(shape, *d.point.exact());
    if (d.accepted ? !(d.threshold_hi <= f) : !(d.threshold_lo >= f)) ++violations;
  });
  std::vector<double> xs;
  for (const auto& o : result.outcomes) {
    if (o.ok()) xs.push_back(o.value);
  }
  const double ks = ks_statistic(xs, [&](double x) { return synthetic_cdf(shape, x); });
  const double critical = 1.63 / std::sqrt(double(N));
  const double loops = result.summary.mean_outer_loops();
  v.require(result.summary.accepted == N, "not every sample accepted");
  v.require(ks <= critical, "KS statistic above the 1% critical value");
  v.require(violations == 0, "post-hoc decision violations");
  v.require(std::abs(loops - 2.0) <= 0.05 * 2.0, "mean outer loops off the envelope mass");
  v.detail << result.summary.accepted << " accepted, KS " << ks << " <= " << critical << ", " << decisions
           << " decisions re-checked with " << violations << " violations, mean outer loops " << loops
           << " vs mass 2 (max level " << result.summary.max_level_reached << ")";
}

void infeasibility(Verdict& v) {
  std::optional<json> reference;
  std::uint64_t samples = 0;
  for (const char* seed : {"1", "7", "987654321"}) {
    const CliRun r = cli({"sample", "--target", "quicksort-paper", "--count", "5", "--seed", seed, "--max-level", "100",
                          "--cache-dir", kCache, "--max-build-seconds", "1800"});
    v.require(r.code == kExitExhausted, std::string("exit code for seed ") + seed);
    const auto rows = json_lines(r.out);
    if (rows.size() != 7) {
      v.require(false, "unexpected number of output lines");
      return;
    }
    for (std::size_t j = 1; j + 1 < rows.size(); ++j, ++samples) {
      v.require(rows[j]["status"] == "exhausted" && rows[j]["level"] == 100, "sample not exhausted at level 100");
    }
    const json& d = rows.back()["diagnosis"];
    if (!reference) reference = d;
    v.require(d == *reference, "diagnosis depends on the seed");
  }
  if (!reference) return;
  const json& d = *reference;
  const double R = d["R_level"]["mid"].get<double>(), inv_delta = d["inv_delta_level"]["mid"].get<double>();
  v.require(std::abs(R - 463) < 1.0, "R_100 not ~463");
  v.require(R > 16 * 10 && R > inv_delta * 10, "R_100 not >> K and 1/delta_100");
  v.require(std::abs(inv_delta - 5.3) < 0.05, "1/delta_100 not ~5.3");
  v.require(d["first_decidable_level"] == "58223502554", "first decidable level");
  v.detail << samples << "/" << samples << " exhausted over seeds {1, 7, 987654321}; R_100 = " << R
           << " >> K = 16 and 1/delta_100 = " << inv_delta << "; first level with R_n < K: "
           << d["first_decidable_level"].get<std::string>() << " (~6e10)";
}

void determinism(Verdict& v) {
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--count", "2000", "--seed", "11", "--rate", "1", "--schedule", "geometric", "--max-level",
       "4000000000000000000"},
      {"sample", "--count", "200", "--seed", "11", "--uniform", "lazy", "--shape", "truncated-quadratic"},
      {"sample", "--target", "quicksort", "--count", "3", "--seed", "5", "--max-level", "100", "--cache-dir", kCache,
       "--max-build-seconds", "1800"},
      {"density", "60", "--xmin", "-2", "--xmax", "3", "--step", "1/50", "--format", "json", "--cache-dir", kCache},
      {"constants", "--n", "100", "--format", "json"},
      {"moments", "--max-order", "6"},
  };
  for (const auto& c : commands) {
    const CliRun a = cli(c), b = cli(c);
    v.require(a.code == b.code && a.out == b.out, "repeat run differs: " + c[0]);
  }
  const std::string base = cli({"table", "45", "--no-cache", "--threads", "1"}).out;
  for (const char* threads : {"2", "4", "8"}) {
    v.require(cli({"table", "45", "--no-cache", "--threads", threads}).out == base, "table differs across threads");
    v.require(cli({"table", "45", "--no-cache", "--threads", threads, "--convolution", "kronecker"}).out == base,
              "table differs across convolution strategies");
  }
  v.detail << commands.size() << " commands repeated byte-identically; table to n=45 identical for threads "
           << "{1,2,4,8} x {schoolbook, kronecker}";
}

}  // namespace

int main() {
  std::filesystem::create_directories(kCache);
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 mass and mean identities", mass_and_mean},
      {"3 support", support},
      {"4 envelope mass", envelope_mass_check},
      {"5 envelope sampler", envelope_sampler},
      {"6 moments", moments_check},
      {"7 end-to-end sampler correctness", sampler_correctness},
      {"8 infeasibility demonstration", infeasibility},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      check(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << v.detail.str() << " ["
              << std::setprecision(3) << seconds_since(start) << " s]" << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
