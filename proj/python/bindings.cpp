#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpsqr/design.hpp"
#include "tpsqr/errors.hpp"
#include "tpsqr/evaluation.hpp"
#include "tpsqr/event_data.hpp"
#include "tpsqr/psqr_oracle.hpp"
#include "tpsqr/solver.hpp"
#include "tpsqr/template.hpp"

namespace py = pybind11;
using namespace tpsqr;
using namespace pybind11::literals;

namespace {

std::vector<EventRecord> to_events(const std::vector<std::tuple<std::string, double, int>>& rows)
{
  std::vector<EventRecord> out;
  out.reserve(rows.size());
  std::size_t line = 1;
  for (const auto& [s, t, o] : rows) out.push_back({s, t, o, ++line});
  return out;
}

using SpanTuple = std::tuple<double, int, std::int64_t>;

py::list sequences_to_py(const std::vector<SubjectSequence>& seqs)
{
  py::list out;
  for (const auto& s : seqs) {
    std::vector<SpanTuple> spans;
    for (const auto& sp : s.spans) spans.emplace_back(sp.t, sp.o, sp.x);
    out.append(py::make_tuple(s.subject_id, spans));
  }
  return out;
}

std::vector<SubjectSequence> sequences_from_py(const std::vector<std::pair<std::string, std::vector<SpanTuple>>>& in)
{
  std::vector<SubjectSequence> out;
  for (const auto& [id, spans] : in) {
    SubjectSequence s{id, {}};
    for (const auto& [t, o, x] : spans) s.spans.push_back({t, o, x});
    out.push_back(std::move(s));
  }
  return out;
}

FitConfig make_fit_config(double lambda, double tol, int max_outer, int max_inner)
{
  FitConfig c;
  c.lambda = lambda;
  c.tol = tol;
  c.max_outer = max_outer;
  c.max_inner = max_inner;
  return c;
}

}  // namespace

PYBIND11_MODULE(_tpsqr, m)
{
  m.doc() = "Temporal Poisson square root graphical models";
  m.attr("__version__") = TPSQR_VERSION;

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)validation;

  py::class_<EventRecord>(m, "EventRecord")
      .def_readonly("subject_id", &EventRecord::subject_id)
      .def_readonly("timestamp", &EventRecord::timestamp)
      .def_readonly("event_type", &EventRecord::event_type)
      .def("__repr__", [](const EventRecord& e) {
        return "EventRecord(" + e.subject_id + ", " + std::to_string(e.timestamp) + ", " + std::to_string(e.event_type) + ")";
      });

  py::class_<Timespan>(m, "Timespan")
      .def_readonly("t", &Timespan::t)
      .def_readonly("o", &Timespan::o)
      .def_readonly("x", &Timespan::x);

  // ---- event data
  m.def(
      "aggregate",
      [](const std::vector<std::tuple<double, int>>& events, double t_ambiguity) {
        std::vector<EventRecord> recs;
        std::size_t line = 1;
        for (const auto& [t, o] : events) recs.push_back({"", t, o, ++line});
        std::vector<SpanTuple> out;
        for (const auto& s : aggregate(recs, t_ambiguity).spans) out.emplace_back(s.t, s.o, s.x);
        return out;
      },
      "events"_a, "t_ambiguity"_a = 0.0,
      "Aggregate one subject's sorted (timestamp, type) events into (t, o, x) spans.");

  m.def(
      "aggregate_dataset",
      [](const std::vector<std::tuple<std::string, double, int>>& events, int p, double t_ambiguity,
         double min_duration) {
        return sequences_to_py(aggregate_dataset(to_events(events), p, {t_ambiguity, min_duration}));
      },
      "events"_a, "p"_a, "t_ambiguity"_a = 0.0, "min_duration"_a = 0.0,
      "Group (subject, timestamp, type) rows by subject and aggregate. Returns [(subject, [(t, o, x)])].");

  m.def("pair_index", &pair_index, "k"_a, "k2"_a, "l"_a, "p"_a, "L"_a);

  // ---- design
  py::class_<DesignProblem>(m, "DesignProblem")
      .def_property_readonly("x", [](const DesignProblem& d) { return d.x; })
      .def_readonly("y", &DesignProblem::y)
      .def_readonly("offset", &DesignProblem::offset)
      .def_readonly("group", &DesignProblem::group)
      .def_readonly("group_labels", &DesignProblem::group_labels)
      .def_readonly("p", &DesignProblem::p)
      .def_readonly("L", &DesignProblem::L)
      .def_property_readonly("rows", &DesignProblem::rows)
      .def_property_readonly("cols", &DesignProblem::cols)
      .def_property_readonly("n_groups", &DesignProblem::n_groups);

  m.def(
      "build_design",
      [](const std::vector<std::pair<std::string, std::vector<SpanTuple>>>& sequences, int p,
         std::vector<double> thresholds, double lambda1, double lambda2, int count_offset, bool fixed_effects,
         bool include_self_pairs) {
        DesignOptions opt;
        opt.discount = {lambda1, lambda2, count_offset};
        opt.fixed_effects = fixed_effects;
        opt.include_self_pairs = include_self_pairs;
        const auto seqs = sequences_from_py(sequences);
        return build_design(seqs, p, LagWindows(std::move(thresholds)), opt);
      },
      "sequences"_a, "p"_a, "thresholds"_a, "lambda1"_a = 1.0, "lambda2"_a = 1.0, "count_offset"_a = 0,
      "fixed_effects"_a = false, "include_self_pairs"_a = true);

  m.def("build_graph_design", &build_graph_design, "samples"_a);
  m.def("lambda_max", &lambda_max, "problem"_a);

  // ---- solver
  py::class_<FitResult>(m, "FitResult")
      .def_readonly("lambda_", &FitResult::lambda)
      .def_property_readonly("intercepts", [](const FitResult& f) { return f.coef.intercepts; })
      .def_property_readonly("weights", [](const FitResult& f) { return f.coef.weights; })
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("penalized", &FitResult::penalized)
      .def_readonly("kkt_residual", &FitResult::kkt_residual)
      .def_readonly("active_set", &FitResult::active_set)
      .def_readonly("free_intercepts", &FitResult::free_intercepts)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_property_readonly("aic", &FitResult::aic);

  py::class_<PathResult>(m, "PathResult")
      .def_readonly("lambdas", &PathResult::lambdas)
      .def_readonly("fits", &PathResult::fits)
      .def_readonly("aic", &PathResult::aic);

  m.def(
      "fit",
      [](const DesignProblem& prob, double lambda, double tol, int max_outer, int max_inner) {
        return fit(prob, make_fit_config(lambda, tol, max_outer, max_inner));
      },
      "problem"_a, "lambda_"_a, "tol"_a = 1e-7, "max_outer"_a = 100, "max_inner"_a = 1000,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "fit_path",
      [](const DesignProblem& prob, int n_lambdas, double lambda_min_ratio, double tol) {
        return fit_path(prob, n_lambdas, lambda_min_ratio, make_fit_config(0.0, tol, 100, 1000));
      },
      "problem"_a, "n_lambdas"_a = 50, "lambda_min_ratio"_a = 1e-3, "tol"_a = 1e-7,
      py::call_guard<py::gil_scoped_release>());

  m.def("select_aic_index", &select_aic_index, "path"_a);

  py::class_<Template>(m, "Template")
      .def_readonly("p", &Template::p)
      .def_readonly("L", &Template::L)
      .def_readonly("omega", &Template::omega)
      .def_readonly("w", &Template::w)
      .def("weight", py::overload_cast<int, int, int>(&Template::weight, py::const_), "k"_a, "k2"_a, "l"_a);

  m.def("to_template", &to_template, "problem"_a, "fit"_a);
  m.def("to_symmetric_theta", &to_symmetric_theta, "problem"_a, "fit"_a);
  m.def(
      "score_pairs", [](const Template& t) { return score_pairs(t).scores; }, "template"_a,
      "p x p matrix of lag-averaged pair weights (0-based indices).");

  // ---- PSQR oracle
  py::class_<PsqrModel>(m, "PsqrModel")
      .def(py::init<Eigen::MatrixXd>(), "theta"_a)
      .def_property_readonly("p", &PsqrModel::p)
      .def_property_readonly("theta", &PsqrModel::theta);

  m.def(
      "log_partition",
      [](const PsqrModel& model, int x_max, double tail_tol) { return log_partition(model, {x_max, tail_tol}); },
      "model"_a, "x_max"_a = 30, "tail_tol"_a = 1e-10);
  m.def(
      "conditional_pmf",
      [](const PsqrModel& model, int j, const std::vector<int>& x, int x_max, double tail_tol) {
        return conditional_pmf(model, j, x, {x_max, tail_tol});
      },
      "model"_a, "j"_a, "x"_a, "x_max"_a = 30, "tail_tol"_a = 1e-10);
  m.def(
      "gibbs_sample",
      [](const PsqrModel& model, int n_samples, int burn_in, int thin, std::uint64_t seed, int x_max) {
        GibbsConfig c;
        c.n_samples = n_samples;
        c.burn_in = burn_in;
        c.thin = thin;
        c.seed = seed;
        c.trunc.x_max = x_max;
        return gibbs_sample(model, c);
      },
      "model"_a, "n_samples"_a = 1000, "burn_in"_a = 1000, "thin"_a = 1, "seed"_a = 0, "x_max"_a = 30,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "random_sparse_model", [](int p, int edges, std::uint64_t seed) { return random_sparse_model(p, edges, seed); },
      "p"_a, "edge_count"_a, "seed"_a);

  // ---- evaluation
  m.def(
      "auc", [](const std::vector<double>& s, const std::vector<bool>& labels) { return auc(s, labels); }, "scores"_a,
      "labels"_a);
  m.def("derive_seed", &derive_seed, "seed"_a, "a"_a, "b"_a = 0);

  m.def(
      "sparsistency_experiment",
      [](int p, int edge_count, std::vector<int> sample_sizes, int trials, std::uint64_t seed, int workers) {
        SparsistencyConfig c;
        c.p = p;
        c.edge_count = edge_count;
        c.sample_sizes = std::move(sample_sizes);
        c.trials = trials;
        c.seed = seed;
        c.workers = workers;
        py::list out;
        const auto res = sparsistency_experiment(c);
        for (const auto& s : res.per_n) {
          out.append(py::dict("n"_a = s.n, "median_f1"_a = s.f1.median, "median_precision"_a = s.precision.median,
                              "median_recall"_a = s.recall.median, "exact_match_rate"_a = s.exact_match_rate,
                              "empty_recovery_rate"_a = s.empty_recovery_rate));
        }
        return out;
      },
      "p"_a = 8, "edge_count"_a = 8, "sample_sizes"_a = std::vector<int>{250, 1000, 4000}, "trials"_a = 20,
      "seed"_a = 0, "workers"_a = 1);

  py::class_<CandidatePair>(m, "CandidatePair")
      .def(py::init([](int d, int c, bool planted) { return CandidatePair{d, c, planted}; }), "drug"_a,
           "condition"_a, "planted"_a = false)
      .def_readonly("drug", &CandidatePair::drug)
      .def_readonly("condition", &CandidatePair::condition)
      .def_readonly("planted", &CandidatePair::planted);

  py::class_<LedBenchmark>(m, "LedBenchmark")
      .def_readonly("p", &LedBenchmark::p)
      .def_readonly("candidates", &LedBenchmark::candidates)
      .def_property_readonly("events", [](const LedBenchmark& b) {
        std::vector<std::tuple<std::string, double, int>> out;
        for (const auto& e : b.events) out.emplace_back(e.subject_id, e.timestamp, e.event_type);
        return out;
      });

  m.def(
      "generate_led_benchmark",
      [](int n_subjects, int n_drugs, int n_conditions, int n_planted, std::uint64_t seed) {
        LedBenchmarkConfig c;
        c.n_subjects = n_subjects;
        c.n_drugs = n_drugs;
        c.n_conditions = n_conditions;
        c.n_planted = n_planted;
        c.seed = seed;
        return generate_led_benchmark(c);
      },
      "n_subjects"_a = 1500, "n_drugs"_a = 10, "n_conditions"_a = 5, "n_planted"_a = 5, "seed"_a = 0);

  m.def(
      "evaluate_candidate_pairs",
      [](const std::vector<std::tuple<std::string, double, int>>& events, int p,
         const std::vector<CandidatePair>& candidates) {
        const auto res = evaluate_candidate_pairs(to_events(events), p, candidates, PipelineConfig{});
        return py::dict("auc"_a = res.auc, "scores"_a = res.candidate_scores, "selected"_a = res.selected,
                        "lambda_"_a = res.path.lambdas[res.selected]);
      },
      "events"_a, "p"_a, "candidates"_a,
      "Default temporal pipeline: aggregate, design, AIC-selected path, pair scores and AUC.");
}
