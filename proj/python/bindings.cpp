// Python extension. Big integers and rationals cross the boundary as decimal
// strings; the package __init__ turns them into int and Fraction.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qslimit/cli.hpp"
#include "qslimit/density.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/synthetic.hpp"

namespace py = pybind11;
using namespace qslimit;

namespace {

std::pair<double, double> bounds(const Enclosure& e) { return {e.lo(), e.hi()}; }

ConstantSet constants_from(const std::optional<std::string>& K, const std::optional<std::string>& Ktilde,
                           const std::optional<std::string>& c) {
  if (!K && !Ktilde && !c) return ConstantSet::paper();
  if (!K || !Ktilde || !c) throw std::invalid_argument("custom constants need K, Ktilde and c together");
  return ConstantSet::custom(parse_rational(*K), parse_rational(*Ktilde), parse_rational(*c));
}

Convolution parse_convolution(const std::string& name) {
  if (name == "schoolbook") return Convolution::schoolbook;
  if (name == "kronecker") return Convolution::kronecker;
  throw std::invalid_argument("unknown convolution: " + name);
}

SamplerOptions sampler_options(std::uint64_t max_level, std::uint64_t max_outer_loops, const std::string& schedule,
                               const std::string& uniform) {
  SamplerOptions o;
  o.budget = {max_level, max_outer_loops};
  if (schedule == "geometric") {
    o.schedule = LevelSchedule::geometric;
  } else if (schedule != "linear") {
    throw std::invalid_argument("unknown schedule: " + schedule);
  }
  if (uniform == "lazy") {
    o.uniform = UniformMode::lazy;
  } else if (uniform != "dyadic53") {
    throw std::invalid_argument("unknown uniform mode: " + uniform);
  }
  return o;
}

py::dict batch_to_dict(const BatchResult& r) {
  py::list values, exhausted;
  for (const auto& o : r.outcomes) {
    if (o.ok()) {
      values.append(o.value);
    } else {
      const auto& x = *o.exhaustion;
      py::dict d;
      d["reason"] = to_string(x.reason);
      d["level"] = x.level;
      d["threshold"] = py::make_tuple(to_string(x.threshold_lo), to_string(x.threshold_hi));
      if (x.estimate) d["estimate"] = bounds(*x.estimate);
      if (x.error_bound) d["error_bound"] = bounds(*x.error_bound);
      exhausted.append(d);
    }
  }
  py::dict out;
  out["values"] = values;
  out["exhausted"] = exhausted;
  out["accepted"] = r.summary.accepted;
  out["total_outer_loops"] = r.summary.total_outer_loops;
  out["mean_outer_loops"] = r.summary.mean_outer_loops();
  out["max_level_reached"] = r.summary.max_level_reached;
  out["oracle_evals"] = r.summary.oracle_evals;
  return out;
}

}  // namespace

PYBIND11_MODULE(_qslimit, m) {
  py::register_exception<TableInvariantError>(m, "TableInvariantError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def(
      "counts",
      [](std::uint64_t n, unsigned threads, const std::string& convolution) {
        BuildOptions o;
        o.threads = threads;
        o.convolution = parse_convolution(convolution);
        const auto tables = build_tables(n, o);
        std::vector<std::string> counts;
        for (const auto& c : tables[n].counts()) counts.push_back(to_string(c));
        return py::make_tuple(tables[n].min_cost(), counts);
      },
      py::arg("n"), py::arg("threads") = 1, py::arg("convolution") = "schoolbook",
      "(min_cost, [N(n, min_cost), ...]) with counts as decimal strings.");
  m.def("brute_force_counts", [](std::uint64_t n) {
    const auto t = brute_force_counts(n);
    std::vector<std::string> counts;
    for (const auto& c : t.counts()) counts.push_back(to_string(c));
    return py::make_tuple(t.min_cost(), counts);
  });
  m.def("support_bounds", [](std::uint64_t n) {
    const auto b = support_bounds(n);
    return py::make_tuple(b.m_n, b.M_n);
  });
  m.def("expected_comparisons", [](std::uint64_t n) { return to_string(expected_comparisons(n)); });

  m.def(
      "delta",
      [](std::uint64_t n, std::optional<std::string> K, std::optional<std::string> Kt, std::optional<std::string> c) {
        return bounds(delta_n(constants_from(K, Kt, c), n));
      },
      py::arg("n"), py::arg("K") = py::none(), py::arg("Ktilde") = py::none(), py::arg("c") = py::none());
  m.def(
      "remainder_bound",
      [](std::uint64_t n, std::optional<std::string> K, std::optional<std::string> Kt, std::optional<std::string> c) {
        return bounds(remainder_bound(constants_from(K, Kt, c), n));
      },
      py::arg("n"), py::arg("K") = py::none(), py::arg("Ktilde") = py::none(), py::arg("c") = py::none());
  m.def("first_decidable_level", [] {
    const auto consts = ConstantSet::paper();
    return to_string(first_level_below(consts, consts.K));
  });
  m.def(
      "density",
      [](std::uint64_t n, const std::string& x) {
        const auto tables = build_tables(n);
        const auto est = fn_eval(tables[n], ConstantSet::paper(), parse_rational(x));
        py::dict d;
        d["window_mass"] = to_string(est.window_mass);
        d["value"] = bounds(est.value());
        d["error_bound"] = bounds(est.error_bound.enclose());
        return d;
      },
      py::arg("n"), py::arg("x"), "f_n(x) for a rational x given as a string such as \"-2/9\".");

  m.def("envelope_mass", [] { return bounds(envelope_mass(EnvelopeSpec::from_constants(ConstantSet::paper()))); });
  m.def("envelope_cdf", [](double x) {
    return bounds(envelope_cdf(EnvelopeSpec::from_constants(ConstantSet::paper()), x));
  });
  m.def(
      "sample_envelope",
      [](std::uint64_t count, std::uint64_t seed) {
        const auto g = EnvelopeSpec::from_constants(ConstantSet::paper());
        UniformStream rng(seed);
        std::vector<double> xs(count);
        for (auto& x : xs) x = sample_envelope(g, rng);
        return xs;
      },
      py::arg("count"), py::arg("seed") = 1);

  m.def(
      "sample_synthetic",
      [](std::uint64_t count, std::uint64_t seed, const std::string& shape, const std::string& amplitude, double rate,
         const std::string& schedule, std::uint64_t max_level, std::uint64_t max_outer_loops,
         const std::string& uniform) {
        const auto target = make_synthetic_target(parse_synthetic_shape(shape),
                                                  ErrorSchedule{parse_rational(amplitude), rate});
        const auto options = sampler_options(max_level, max_outer_loops, schedule, uniform);
        BatchResult result;
        {
          py::gil_scoped_release release;
          UniformStream rng(seed);
          result = batch_sample(target, rng, count, options);
        }
        return batch_to_dict(result);
      },
      py::arg("count"), py::arg("seed") = 1, py::arg("shape") = "triangular", py::arg("amplitude") = "1",
      py::arg("rate") = 1.0, py::arg("schedule") = "geometric", py::arg("max_level") = std::uint64_t{1} << 62,
      py::arg("max_outer_loops") = 100000, py::arg("uniform") = "dyadic53");
  m.def(
      "sample_quicksort",
      [](std::uint64_t count, std::uint64_t seed, std::uint64_t max_level, std::optional<std::string> cache_dir,
         const std::string& schedule) {
        std::optional<std::filesystem::path> dir;
        if (cache_dir) dir = *cache_dir;
        const auto target = make_quicksort_target(ConstantSet::paper(), std::make_shared<TableStore>(BuildOptions{}, dir));
        const auto options = sampler_options(max_level, 100000, schedule, "dyadic53");
        BatchResult result;
        {
          py::gil_scoped_release release;
          UniformStream rng(seed);
          result = batch_sample(target, rng, count, options);
        }
        return batch_to_dict(result);
      },
      py::arg("count"), py::arg("seed") = 1, py::arg("max_level") = 30, py::arg("cache_dir") = py::none(),
      py::arg("schedule") = "linear");

  m.def("toll", &toll);
  m.def(
      "moments",
      [](unsigned max_order) {
        std::vector<std::pair<double, double>> out;
        for (const auto& a : MomentTable(max_order).all()) out.emplace_back(a.value, a.error);
        return out;
      },
      py::arg("max_order") = 4, "[(m_p, error bound)] for p = 0..max_order.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a qslimit subcommand in-process; returns (exit_code, stdout, stderr).");
}
