// tpsqr: batch driver for aggregation, fitting, simulation and evaluation.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpsqr/design.hpp"
#include "tpsqr/errors.hpp"
#include "tpsqr/evaluation.hpp"
#include "tpsqr/event_data.hpp"
#include "tpsqr/io.hpp"
#include "tpsqr/psqr_oracle.hpp"
#include "tpsqr/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tpsqr;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

json default_config()
{
  return json{
      {"events", nullptr},
      {"header", nullptr},
      {"aggregated", nullptr},
      {"p", nullptr},
      {"thresholds", {0.0, 30.0, 90.0, 180.0}},
      {"t_ambiguity", 0.0},
      {"min_duration", 0.0},
      {"preset", nullptr},
      {"discount", {{"lambda1", 1.0}, {"lambda2", 1.0}, {"count_offset", 0}}},
      {"fixed_effects", false},
      {"include_self_pairs", true},
      {"lambda", nullptr},
      {"lambda_ratio", nullptr},
      {"n_lambdas", 50},
      {"lambda_min_ratio", 1e-3},
      {"tol", 1e-7},
      {"max_outer", 100},
      {"max_inner", 1000},
      {"dump_design", false},
      {"record_timing", false},
      {"seed", 0},
      {"workers", 1},
      {"out", "tpsqr_out"},
      {"simulate",
       {{"kind", "psqr"},
        {"theta", nullptr},
        {"p", 8},
        {"edge_count", 8},
        {"n_samples", 1000},
        {"burn_in", 1000},
        {"thin", 1},
        {"x_max", 30},
        {"tail_tol", 1e-10},
        {"led",
         {{"n_subjects", 1500},
          {"n_drugs", 10},
          {"n_conditions", 5},
          {"n_planted", 5},
          {"min_length", 1200.0},
          {"max_length", 3000.0},
          {"drug_episode_rate", 1.0 / 1200.0},
          {"refill_mean", 1.5},
          {"refill_gap", 30.0},
          {"condition_rate", 1.0 / 1500.0},
          {"condition_repeat_mean", 0.5},
          {"repeat_gap", 15.0},
          {"excess_mean", 0.5},
          {"risk_window", 300.0},
          {"frailty_shape", 2.0}}}}},
      {"evaluate",
       {{"kind", "auc"},
        {"scores", nullptr},
        {"candidates", nullptr},
        {"sparsistency",
         {{"p", 8},
          {"edge_count", 8},
          {"sample_sizes", {250, 1000, 4000}},
          {"trials", 20},
          {"burn_in", 500},
          {"thin", 2},
          {"x_max", 30},
          {"tail_tol", 1e-10}}}}},
  };
}

// Every user key must exist in the defaults; nested objects are checked recursively.
void check_keys(const json& user, const json& defaults, const std::string& prefix)
{
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) throw ValidationError("config: unknown key '" + prefix + key + "'");
    const auto& d = defaults.at(key);
    if (d.is_object() && !value.is_null()) {
      if (!value.is_object()) throw ValidationError("config: '" + prefix + key + "' must be an object");
      check_keys(value, d, prefix + key + ".");
    }
  }
}

std::uint64_t fnv1a(const std::string& text)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v)
{
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

template <class T>
T get(const json& j, const char* key)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: bad or missing value for '") + key + "'");
  }
}

// merge_patch drops keys patched to null; put the defaults back.
void restore_nulls(json& resolved, const json& defaults)
{
  for (const auto& [k, v] : defaults.items()) {
    if (!resolved.contains(k)) {
      resolved[k] = v;
    } else if (v.is_object() && resolved[k].is_object()) {
      restore_nulls(resolved[k], v);
    }
  }
}

// Rethrows with the stage name prepended, keeping the error category.
template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn())
{
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(name + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw ValidationError(name + ": " + e.what());
  }
}

class Run {
 public:
  Run(std::string command, json config, fs::path base, fs::path out)
      : command_(std::move(command)), config_(std::move(config)), base_(std::move(base)),
        out_(out.is_absolute() ? out : base_ / out), start_(std::chrono::steady_clock::now())
  {
    fs::create_directories(out_);
  }

  const json& config() const { return config_; }

  fs::path input(const char* key) const
  {
    if (config_.at(key).is_null()) throw ValidationError(std::string("config: '") + key + "' is required");
    const auto path = resolve(get<std::string>(config_, key));
    if (!fs::is_regular_file(path)) throw ValidationError("input file not found: " + path.string());
    return path;
  }

  fs::path input_nested(const json& section, const char* key) const
  {
    if (section.at(key).is_null()) throw ValidationError(std::string("config: '") + key + "' is required");
    const auto path = resolve(get<std::string>(section, key));
    if (!fs::is_regular_file(path)) throw ValidationError("input file not found: " + path.string());
    return path;
  }

  std::ofstream open(const std::string& name)
  {
    outputs_.push_back(name);
    std::ofstream os(out_ / name, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + (out_ / name).string());
    return os;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  // The output directory is left out of the echoed config so reruns into
  // different directories produce identical manifests.
  void finish()
  {
    json echoed = config_;
    echoed.erase("out");
    const auto resolved = echoed.dump();
    json manifest{{"tool", "tpsqr"},
                  {"version", TPSQR_VERSION},
                  {"command", command_},
                  {"config", echoed},
                  {"config_hash", "fnv1a64:" + hex(fnv1a(resolved))},
                  {"seed", config_.at("seed")},
                  {"workers", config_.at("workers")},
                  {"outputs", outputs_}};
    if (config_.at("record_timing").get<bool>()) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      manifest["elapsed_seconds"] = elapsed.count();
    }
    std::ofstream os(out_ / "manifest.json", std::ios::binary);
    os << manifest.dump(2) << '\n';
  }

 private:
  fs::path resolve(const std::string& p) const
  {
    const fs::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  std::string command_;
  json config_;
  fs::path base_;
  fs::path out_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

int resolve_p(const Run& run)
{
  int p = 0;
  if (!run.config().at("header").is_null()) {
    std::ifstream is(run.input("header"));
    json h;
    try {
      is >> h;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("header: ") + e.what());
    }
    p = io::header_from_json(h).p;
  }
  if (!run.config().at("p").is_null()) {
    const int q = get<int>(run.config(), "p");
    if (p != 0 && p != q) throw ValidationError("config p disagrees with the dataset header");
    p = q;
  }
  if (p < 1) throw ValidationError("number of event types unknown: set 'p' or 'header'");
  return p;
}

AggregateOptions aggregate_options(const json& c)
{
  return {get<double>(c, "t_ambiguity"), get<double>(c, "min_duration")};
}

DesignOptions design_options(const json& c)
{
  DesignOptions opt;
  if (!c.at("preset").is_null()) {
    if (get<std::string>(c, "preset") != "adr") throw ValidationError("config: unknown preset");
    opt.discount = DiscountConfig::adr_preset();
  } else {
    const auto& d = c.at("discount");
    opt.discount = {get<double>(d, "lambda1"), get<double>(d, "lambda2"), get<int>(d, "count_offset")};
  }
  opt.fixed_effects = get<bool>(c, "fixed_effects");
  opt.include_self_pairs = get<bool>(c, "include_self_pairs");
  return opt;
}

FitConfig fit_config(const json& c)
{
  FitConfig f;
  f.tol = get<double>(c, "tol");
  f.max_outer = get<int>(c, "max_outer");
  f.max_inner = get<int>(c, "max_inner");
  return f;
}

TruncationConfig truncation(const json& c)
{
  return {get<int>(c, "x_max"), get<double>(c, "tail_tol")};
}

std::vector<SubjectSequence> load_sequences(const Run& run, int p)
{
  const auto& c = run.config();
  if (!c.at("aggregated").is_null()) {
    std::ifstream is(run.input("aggregated"));
    return stage("read aggregated", [&] { return io::read_aggregated_csv(is); });
  }
  std::ifstream is(run.input("events"));
  const auto events = stage("read events", [&] { return io::read_events_csv(is); });
  return stage("aggregate", [&] { return aggregate_dataset(events, p, aggregate_options(c)); });
}

int cmd_aggregate(Run& run)
{
  const int p = resolve_p(run);
  std::ifstream is(run.input("events"));
  const auto events = stage("read events", [&] { return io::read_events_csv(is); });
  const auto seqs = stage("aggregate", [&] { return aggregate_dataset(events, p, aggregate_options(run.config())); });
  auto csv = run.open("aggregated.csv");
  io::write_aggregated_csv(csv, seqs);
  std::size_t spans = 0;
  for (const auto& s : seqs) spans += s.size();
  run.write_json("summary.json", {{"subjects", seqs.size()}, {"spans", spans}, {"events", events.size()}, {"p", p}});
  return 0;
}

struct Prepared {
  LagWindows windows;
  DesignProblem problem;
};

Prepared prepare(Run& run)
{
  const auto& c = run.config();
  const int p = resolve_p(run);
  LagWindows windows = stage("config", [&] { return LagWindows(get<std::vector<double>>(c, "thresholds")); });
  const auto seqs = load_sequences(run, p);
  auto problem = stage("design", [&] { return build_design(seqs, p, windows, design_options(c)); });
  if (problem.rows() == 0) throw ValidationError("design: no rows after aggregation");
  if (get<bool>(c, "dump_design")) {
    auto trip = run.open("design_triplets.txt");
    write_triplets(trip, problem);
    auto resp = run.open("responses.csv");
    resp << "row,y,group\n";
    for (Eigen::Index r = 0; r < problem.rows(); ++r) {
      resp << r << ',' << io::format_double(problem.y(r)) << ',' << problem.group[static_cast<std::size_t>(r)] << '\n';
    }
  }
  return {std::move(windows), std::move(problem)};
}

int report_convergence(const std::vector<const FitResult*>& fits)
{
  for (const auto* f : fits) {
    if (!f->converged) {
      std::cerr << "tpsqr: solver: fit at lambda=" << f->lambda << " did not converge\n";
      return kExitNumerical;
    }
  }
  return 0;
}

int cmd_fit(Run& run)
{
  const auto& c = run.config();
  auto [windows, problem] = prepare(run);
  auto cfg = fit_config(c);
  if (!c.at("lambda").is_null()) {
    cfg.lambda = get<double>(c, "lambda");
  } else if (!c.at("lambda_ratio").is_null()) {
    cfg.lambda = get<double>(c, "lambda_ratio") * lambda_max(problem);
  } else {
    throw ValidationError("config: fit needs 'lambda' or 'lambda_ratio'");
  }
  const auto res = stage("solver", [&] { return fit(problem, cfg); });
  json report = io::fit_report(res);
  report["lambda_max"] = lambda_max(problem);
  run.write_json("fit.json", report);
  run.write_json("template.json", io::template_to_json(to_template(problem, res), windows));
  return report_convergence({&res});
}

PathResult run_path(const Run& run, const DesignProblem& problem)
{
  const auto& c = run.config();
  return stage("solver", [&] {
    return fit_path(problem, get<int>(c, "n_lambdas"), get<double>(c, "lambda_min_ratio"), fit_config(c));
  });
}

json path_json(const PathResult& path)
{
  json rows = json::array();
  for (const auto& f : path.fits) rows.push_back(io::fit_report(f));
  return json{{"lambdas", path.lambdas}, {"fits", rows}};
}

int cmd_path(Run& run)
{
  auto [windows, problem] = prepare(run);
  const auto path = run_path(run, problem);
  run.write_json("path.json", path_json(path));
  std::vector<const FitResult*> fits;
  for (const auto& f : path.fits) fits.push_back(&f);
  return report_convergence(fits);
}

int cmd_select(Run& run)
{
  auto [windows, problem] = prepare(run);
  const auto path = run_path(run, problem);
  const auto k = select_aic_index(path);
  run.write_json("path.json", path_json(path));
  json sel = io::fit_report(path.fits[k]);
  sel["index"] = k;
  run.write_json("selected.json", sel);
  run.write_json("template.json", io::template_to_json(to_template(problem, path.fits[k]), windows));
  return report_convergence({&path.fits[k]});
}

int cmd_simulate(Run& run)
{
  const auto& c = run.config();
  const auto& s = c.at("simulate");
  const auto seed = get<std::uint64_t>(c, "seed");
  const auto kind = get<std::string>(s, "kind");
  if (kind == "psqr") {
    const auto trunc = truncation(s);
    const PsqrModel model = stage("model", [&] {
      if (!s.at("theta").is_null()) return io::model_from_json(json{{"theta", s.at("theta")}});
      return random_sparse_model(get<int>(s, "p"), get<int>(s, "edge_count"), derive_seed(seed, 0), trunc);
    });
    GibbsConfig g;
    g.n_samples = get<int>(s, "n_samples");
    g.burn_in = get<int>(s, "burn_in");
    g.thin = get<int>(s, "thin");
    g.seed = derive_seed(seed, 1);
    g.trunc = trunc;
    const auto samples = stage("gibbs", [&] { return gibbs_sample(model, g); });
    auto csv = run.open("samples.csv");
    io::write_samples_csv(csv, samples);
    run.write_json("model.json", io::model_to_json(model));
    return 0;
  }
  if (kind == "led") {
    const auto& l = s.at("led");
    LedBenchmarkConfig cfg;
    cfg.n_subjects = get<int>(l, "n_subjects");
    cfg.n_drugs = get<int>(l, "n_drugs");
    cfg.n_conditions = get<int>(l, "n_conditions");
    cfg.n_planted = get<int>(l, "n_planted");
    cfg.min_length = get<double>(l, "min_length");
    cfg.max_length = get<double>(l, "max_length");
    cfg.drug_episode_rate = get<double>(l, "drug_episode_rate");
    cfg.refill_mean = get<double>(l, "refill_mean");
    cfg.refill_gap = get<double>(l, "refill_gap");
    cfg.condition_rate = get<double>(l, "condition_rate");
    cfg.condition_repeat_mean = get<double>(l, "condition_repeat_mean");
    cfg.repeat_gap = get<double>(l, "repeat_gap");
    cfg.excess_mean = get<double>(l, "excess_mean");
    cfg.risk_window = get<double>(l, "risk_window");
    cfg.frailty_shape = get<double>(l, "frailty_shape");
    cfg.seed = seed;
    const auto bench = stage("simulate", [&] { return generate_led_benchmark(cfg); });
    auto ev = run.open("events.csv");
    io::write_events_csv(ev, bench.events);
    run.write_json("header.json", io::to_json(io::DatasetHeader{bench.p, "day"}));
    auto cand = run.open("candidates.csv");
    cand << "drug,condition,planted\n";
    for (const auto& x : bench.candidates) cand << x.drug << ',' << x.condition << ',' << (x.planted ? 1 : 0) << '\n';
    return 0;
  }
  throw ValidationError("config: simulate.kind must be 'psqr' or 'led'");
}

// Two-column CSV with a header row: value,label (label 0/1).
std::vector<std::pair<double, bool>> read_labeled(const fs::path& path, const char* first)
{
  std::ifstream is(path);
  std::string line;
  std::vector<std::pair<double, bool>> out;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind(first, 0) != 0) throw ValidationError("line 1: expected header starting with '" + std::string(first) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected two fields");
    }
    try {
      out.emplace_back(std::stod(a), std::stoi(b) != 0);
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
  }
  return out;
}

std::vector<CandidatePair> read_candidates(const fs::path& path)
{
  std::ifstream is(path);
  std::string line;
  std::vector<CandidatePair> out;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    CandidatePair c;
    char sep1 = 0, sep2 = 0;
    int planted = 0;
    std::istringstream ss(line);
    if (!(ss >> c.drug >> sep1 >> c.condition >> sep2 >> planted) || sep1 != ',' || sep2 != ',') {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'drug,condition,planted'");
    }
    c.planted = planted != 0;
    out.push_back(c);
  }
  return out;
}

int cmd_evaluate(Run& run)
{
  const auto& c = run.config();
  const auto& e = c.at("evaluate");
  const auto kind = get<std::string>(e, "kind");
  if (kind == "auc") {
    const auto rows = read_labeled(run.input_nested(e, "scores"), "score");
    std::vector<double> s;
    std::vector<bool> y;
    for (const auto& [v, l] : rows) {
      s.push_back(v);
      y.push_back(l);
    }
    const double value = stage("auc", [&] { return auc(s, y); });
    run.write_json("auc.json", {{"auc", value}, {"n", s.size()}});
    return 0;
  }
  if (kind == "adr") {
    const int p = resolve_p(run);
    const auto cands = read_candidates(run.input_nested(e, "candidates"));
    std::ifstream is(run.input("events"));
    const auto events = stage("read events", [&] { return io::read_events_csv(is); });
    PipelineConfig pc;
    pc.thresholds = get<std::vector<double>>(c, "thresholds");
    pc.aggregate = aggregate_options(c);
    pc.design = design_options(c);
    pc.n_lambdas = get<int>(c, "n_lambdas");
    pc.lambda_min_ratio = get<double>(c, "lambda_min_ratio");
    pc.fit = fit_config(c);
    const auto res = stage("pipeline", [&] { return evaluate_candidate_pairs(events, p, cands, pc); });
    json scores = json::array();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      scores.push_back({{"drug", cands[i].drug},
                        {"condition", cands[i].condition},
                        {"planted", cands[i].planted},
                        {"score", res.candidate_scores[i]}});
    }
    json sel = io::fit_report(res.path.fits[res.selected]);
    sel["index"] = res.selected;
    run.write_json("adr.json", {{"auc", res.auc}, {"selected", sel}, {"candidates", scores}});
    return 0;
  }
  if (kind == "sparsistency") {
    const auto& sp = e.at("sparsistency");
    SparsistencyConfig cfg;
    cfg.p = get<int>(sp, "p");
    cfg.edge_count = get<int>(sp, "edge_count");
    cfg.sample_sizes = get<std::vector<int>>(sp, "sample_sizes");
    cfg.trials = get<int>(sp, "trials");
    cfg.burn_in = get<int>(sp, "burn_in");
    cfg.thin = get<int>(sp, "thin");
    cfg.trunc = truncation(sp);
    cfg.seed = get<std::uint64_t>(c, "seed");
    cfg.n_lambdas = get<int>(c, "n_lambdas");
    cfg.lambda_min_ratio = get<double>(c, "lambda_min_ratio");
    cfg.fit = fit_config(c);
    cfg.workers = get<int>(c, "workers");
    const auto res = stage("sparsistency", [&] { return sparsistency_experiment(cfg); });
    auto q = [](const Quantiles& x) {
      return json{{"min", x.min}, {"q25", x.q25}, {"median", x.median}, {"q75", x.q75}, {"max", x.max}};
    };
    json per_n = json::array();
    for (const auto& s : res.per_n) {
      per_n.push_back({{"n", s.n},
                       {"precision", q(s.precision)},
                       {"recall", q(s.recall)},
                       {"f1", q(s.f1)},
                       {"exact_match_rate", s.exact_match_rate},
                       {"empty_recovery_rate", s.empty_recovery_rate}});
    }
    json trials = json::array();
    for (const auto& t : res.trials) {
      trials.push_back({{"n", t.n},
                        {"trial", t.trial},
                        {"lambda", t.selected_lambda},
                        {"precision", t.report.precision},
                        {"recall", t.report.recall},
                        {"f1", t.report.f1},
                        {"true_edges", t.report.true_edges.size()},
                        {"recovered_edges", t.report.recovered_edges.size()}});
    }
    run.write_json("sparsistency.json", {{"per_n", per_n}, {"trials", trials}});
    return 0;
  }
  throw ValidationError("config: evaluate.kind must be 'auc', 'adr' or 'sparsistency'");
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Temporal Poisson square root graphical models"};
  app.set_version_flag("--version", std::string(TPSQR_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"aggregate", "Aggregate raw events into timespans"},
      {"fit", "Fit at a single penalty"},
      {"path", "Fit a warm-started penalty path"},
      {"select", "Fit a path and select by AIC"},
      {"simulate", "Draw synthetic PSQR samples or longitudinal events"},
      {"evaluate", "AUC, candidate-pair scoring or sparsistency runs"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "Overrides config 'seed'");
    sub->add_option("--workers", workers, "Overrides config 'workers'")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Overrides config 'out' (output directory)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    json user = json::object();
    fs::path base = fs::current_path();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ValidationError("cannot open config " + config_path);
      try {
        is >> user;
      } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
      }
      if (!user.is_object()) throw ValidationError("config: top level must be an object");
      base = fs::absolute(config_path).parent_path();
    }
    const json defaults = default_config();
    check_keys(user, defaults, "");
    json resolved = defaults;
    resolved.merge_patch(user);
    restore_nulls(resolved, defaults);
    if (seed) resolved["seed"] = *seed;
    if (workers) resolved["workers"] = *workers;
    fs::path out_dir = base / get<std::string>(resolved, "out");
    if (out) {
      resolved["out"] = *out;
      out_dir = fs::absolute(*out);
    }

    Run run(command, resolved, base, out_dir);
    const std::map<std::string, std::function<int(Run&)>> dispatch{
        {"aggregate", cmd_aggregate}, {"fit", cmd_fit},           {"path", cmd_path},
        {"select", cmd_select},       {"simulate", cmd_simulate}, {"evaluate", cmd_evaluate},
    };
    const int code = dispatch.at(command)(run);
    run.finish();
    return code;
  } catch (const NumericalError& e) {
    std::cerr << "tpsqr: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "tpsqr: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tpsqr: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "tpsqr: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "tpsqr: " << e.what() << '\n';
    return kExitValidation;
  }
}
