// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "reference.hpp"
#include "tpsqr/design.hpp"
#include "tpsqr/evaluation.hpp"
#include "tpsqr/event_data.hpp"
#include "tpsqr/io.hpp"
#include "tpsqr/psqr_oracle.hpp"
#include "tpsqr/solver.hpp"

using namespace tpsqr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

SubjectSequence random_sequence(std::mt19937_64& rng, int p, int n, const std::string& id)
{
  SubjectSequence seq{id, {}};
  double t = 0;
  int prev = 0;
  for (int j = 0; j < n; ++j) {
    int o = 1 + static_cast<int>(rng() % static_cast<unsigned>(p));
    if (o == prev) o = o % p + 1;
    seq.spans.push_back({t, o, static_cast<std::int64_t>(rng() % 3)});
    prev = o;
    t += 1 + static_cast<double>(rng() % 40);
  }
  return seq;
}

// ---------------------------------------------------------------- 1
Outcome aggregation_two_subject()
{
  std::ifstream is(TPSQR_FIXTURES "/two_subject_events.csv");
  std::ifstream hs(TPSQR_FIXTURES "/two_subject_header.json");
  nlohmann::json header;
  hs >> header;
  const auto events = io::read_events_csv(is);
  const auto seqs = aggregate_dataset(events, io::header_from_json(header).p, {});
  const std::vector<Timespan> expected{{1, 1, 1}, {121, 2, 1}, {231, 3, 2}, {361, 1, 0}};
  const bool ok = !seqs.empty() && seqs[0].subject_id == "1" && seqs[0].spans == expected;
  std::ostringstream os;
  if (!seqs.empty()) {
    os << "subject 1 spans:";
    for (const auto& s : seqs[0].spans) os << " (" << s.t << "," << s.o << "," << s.x << ")";
  }
  return {ok, os.str()};
}

// ---------------------------------------------------------------- 2
Outcome gradient_check()
{
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int p = 2 + rep % 5;  // 2..6
    std::vector<SubjectSequence> seqs;
    for (int i = 0; i < 5; ++i) seqs.push_back(random_sequence(rng, p, 3 + static_cast<int>(rng() % 10), std::to_string(i)));
    DesignOptions opt;
    if (rep % 2) opt.discount = DiscountConfig::adr_preset();
    opt.fixed_effects = rep % 3 == 0;
    const auto prob = build_design(seqs, p, LagWindows({0, 15, 45, 120}), opt);
    const Eigen::Index n_int = prob.n_groups();
    Eigen::VectorXd theta(n_int + prob.cols());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = (i < n_int ? 0.5 : 0.1) * normal(rng);

    auto split = [&](const Eigen::VectorXd& th) {
      return Coefficients{th.head(n_int), th.tail(prob.cols())};
    };
    const auto og = objective_and_gradient(prob, split(theta));
    Eigen::VectorXd g(theta.size());
    g << og.intercepts, og.weights;
    const auto fd = reference::finite_difference(
        [&](const Eigen::VectorXd& th) { return objective_and_gradient(prob, split(th)).value; }, theta);
    const double rel = (g - fd).norm() / std::max(g.norm(), fd.norm());
    worst = std::max(worst, rel);
  }
  return {worst < 1e-6, "max relative error " + fmt(worst) + " over 50 problems"};
}

// ---------------------------------------------------------------- 3
Outcome solver_oracle()
{
  std::mt19937_64 rng(77);
  double worst_diff = 0.0;
  double worst_kkt = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int rows = 60 + static_cast<int>(rng() % 141);  // <= 200
    const int cols = 5 + static_cast<int>(rng() % 26);    // <= 30
    const int groups = 1 + static_cast<int>(rng() % 4);
    const auto prob = reference::random_problem(rng, rows, cols, groups, 0.25);
    const double frac = std::array<double, 4>{0.5, 0.2, 0.08, 0.03}[static_cast<std::size_t>(rep % 4)];
    FitConfig cfg;
    cfg.lambda = frac * lambda_max(prob);
    cfg.tol = 1e-12;
    cfg.max_outer = 500;
    const auto res = fit(prob, cfg);
    const auto dense = reference::densify(prob);
    const auto ref = reference::proximal_gradient(dense, cfg.lambda);
    Eigen::VectorXd mine(res.coef.intercepts.size() + res.coef.weights.size());
    mine << res.coef.intercepts, res.coef.weights;
    worst_diff = std::max(worst_diff, (mine - ref).cwiseAbs().maxCoeff());

    // KKT audit from the reference gradient, independent of the library
    const Eigen::VectorXd g = reference::poisson_grad(dense, mine);
    for (Eigen::Index i = 0; i < mine.size(); ++i) {
      double v;
      if (i < groups) {
        v = std::abs(g(i));
      } else if (mine(i) != 0.0) {
        v = std::abs(g(i) + cfg.lambda * (mine(i) > 0 ? 1.0 : -1.0));
      } else {
        v = std::max(0.0, std::abs(g(i)) - cfg.lambda);
      }
      worst_kkt = std::max(worst_kkt, v);
    }
  }
  return {worst_diff < 1e-5 && worst_kkt < 1e-6,
          "max coefficient gap " + fmt(worst_diff) + ", max KKT violation " + fmt(worst_kkt)};
}

// ---------------------------------------------------------------- 4
Outcome lambda_max_certificate()
{
  std::mt19937_64 rng(404);
  int ok = 0;
  for (int rep = 0; rep < 20; ++rep) {
    DesignProblem prob;
    if (rep % 2 == 0) {
      prob = reference::random_problem(rng, 100 + static_cast<int>(rng() % 100), 5 + static_cast<int>(rng() % 25),
                                       1 + static_cast<int>(rng() % 4));
    } else {
      std::vector<SubjectSequence> seqs;
      const int p = 2 + static_cast<int>(rng() % 4);
      for (int i = 0; i < 8; ++i) seqs.push_back(random_sequence(rng, p, 2 + static_cast<int>(rng() % 12), std::to_string(i)));
      DesignOptions opt;
      opt.discount = DiscountConfig::adr_preset();
      prob = build_design(seqs, p, LagWindows({0, 20, 60}), opt);
    }
    const double lmax = lambda_max(prob);
    FitConfig cfg;
    cfg.lambda = 1.000001 * lmax;
    const bool empty_above = fit(prob, cfg).active_set.empty();
    cfg.lambda = 0.5 * lmax;
    const bool nonempty_below = !fit(prob, cfg).active_set.empty();
    ok += (lmax > 0.0 && empty_above && nonempty_below) ? 1 : 0;
  }
  return {ok == 20, std::to_string(ok) + "/20 problems certified"};
}

// ---------------------------------------------------------------- 5
Outcome exact_consistency()
{
  // conditionals versus joint renormalization
  double worst = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int p = 1; p <= 3; ++p) {
    for (int x_max : {4, 8}) {
      Eigen::MatrixXd theta(p, p);
      for (int j = 0; j < p; ++j) {
        for (int k = j; k < p; ++k) theta(j, k) = theta(k, j) = unit(rng);
      }
      const PsqrModel m(theta);
      const TruncationConfig trunc{x_max, 1.0};
      const double log_z = log_partition(m, trunc);
      std::vector<int> x(static_cast<std::size_t>(p), 0);
      while (true) {
        for (int j = 0; j < p; ++j) {
          const auto pmf = conditional_pmf(m, j, x, trunc);
          auto y = x;
          Eigen::VectorXd slice(x_max + 1);
          for (int v = 0; v <= x_max; ++v) {
            y[static_cast<std::size_t>(j)] = v;
            slice(v) = std::exp(log_potential(m, y) - log_z);
          }
          slice /= slice.sum();
          worst = std::max(worst, (pmf - slice).cwiseAbs().maxCoeff());
        }
        int j = 0;
        while (j < p && x[static_cast<std::size_t>(j)] == x_max) x[static_cast<std::size_t>(j++)] = 0;
        if (j == p) break;
        ++x[static_cast<std::size_t>(j)];
      }
    }
  }

  // Gibbs slices
  Eigen::MatrixXd theta(3, 3);
  theta << 0.3, -0.4, 0.2, -0.4, -0.1, -0.3, 0.2, -0.3, 0.4;
  const PsqrModel m(theta);
  GibbsConfig g;
  g.n_samples = 100000;
  g.burn_in = 1000;
  g.seed = 55;
  const auto s = gibbs_sample(m, g);
  double worst_tv = 0.0;
  int slices = 0;
  for (int j = 0; j < 3; ++j) {
    std::map<std::vector<int>, Eigen::VectorXd> counts;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      std::vector<int> rest;
      for (int k = 0; k < 3; ++k) rest.push_back(k == j ? 0 : s(i, k));
      auto& c = counts[rest];
      if (c.size() == 0) c = Eigen::VectorXd::Zero(g.trunc.x_max + 1);
      c(s(i, j)) += 1.0;
    }
    // the three most populated conditioning slices of each coordinate
    std::vector<std::pair<double, std::vector<int>>> by_size;
    for (const auto& [rest, c] : counts) by_size.emplace_back(c.sum(), rest);
    std::sort(by_size.rbegin(), by_size.rend());
    for (std::size_t k = 0; k < std::min<std::size_t>(3, by_size.size()); ++k) {
      const auto& rest = by_size[k].second;
      const Eigen::VectorXd emp = counts[rest] / by_size[k].first;
      const auto exact = conditional_pmf(m, j, rest, g.trunc);
      worst_tv = std::max(worst_tv, 0.5 * (emp - exact).cwiseAbs().sum());
      ++slices;
    }
  }
  return {worst < 1e-10 && worst_tv < 0.02,
          "conditional/joint gap " + fmt(worst) + ", worst slice TV " + fmt(worst_tv) + " over " +
              std::to_string(slices) + " slices"};
}

// ---------------------------------------------------------------- 6
Outcome sparsistency()
{
  SparsistencyConfig cfg;
  cfg.seed = 6;
  const auto res = sparsistency_experiment(cfg);
  std::ostringstream os;
  bool monotone = true;
  for (std::size_t k = 0; k < res.per_n.size(); ++k) {
    os << "n=" << res.per_n[k].n << " median F1 " << fmt(res.per_n[k].f1.median) << "; ";
    if (k > 0 && res.per_n[k].f1.median < res.per_n[k - 1].f1.median) monotone = false;
  }
  const double final_f1 = res.per_n.back().f1.median;

  auto null_cfg = cfg;
  null_cfg.edge_count = 0;
  null_cfg.seed = 66;
  const auto null_res = sparsistency_experiment(null_cfg);
  double worst_empty = 1.0;
  for (const auto& s : null_res.per_n) {
    os << "null n=" << s.n << " empty rate " << fmt(s.empty_recovery_rate) << "; ";
    worst_empty = std::min(worst_empty, s.empty_recovery_rate);
  }
  return {monotone && final_f1 >= 0.9 && worst_empty >= 0.9, os.str()};
}

// ---------------------------------------------------------------- 7
Outcome planted_auc()
{
  LedBenchmarkConfig cfg;
  cfg.seed = 7;
  const auto bench = generate_led_benchmark(cfg);
  const PipelineConfig pipeline;
  const auto res = evaluate_candidate_pairs(bench.events, bench.p, bench.candidates, pipeline);
  const auto& chosen = res.path.fits[res.selected];
  return {res.auc >= 0.85, "AUC " + fmt(res.auc) + " (selected path point " + std::to_string(res.selected) +
                               ", " + std::to_string(chosen.active_set.size()) + " active columns, " +
                               std::to_string(bench.events.size()) + " events)"};
}

// ---------------------------------------------------------------- 8
#ifdef TPSQR_CLI
int run_cli(const std::string& args)
{
  const std::string cmd = std::string(TPSQR_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism()
{
  const fs::path dir = fs::temp_directory_path() / ("tpsqr_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const nlohmann::json& j) {
    std::ofstream(dir / name) << j.dump(2);
    return (dir / name).string();
  };
  std::ofstream(dir / "scores.csv") << "score,label\n0.9,1\n0.4,0\n0.6,1\n0.1,0\n0.5,0\n";

  // shared inputs
  const auto led = write("led.json", {{"out", "led"},
                                       {"simulate", {{"kind", "led"}, {"led", {{"n_subjects", 120}, {"n_drugs", 4}, {"n_conditions", 3}, {"n_planted", 2}}}}}});
  if (run_cli("simulate -c " + led + " --seed 11") != 0) return {false, "LED simulation failed"};
  {
    std::ofstream c(dir / "cands.csv");
    c << slurp(dir / "led" / "candidates.csv");
  }

  const nlohmann::json data{{"events", "led/events.csv"}, {"header", "led/header.json"},
                            {"thresholds", {0, 100, 300, 600}}, {"preset", "adr"}, {"n_lambdas", 12}};
  std::vector<std::pair<std::string, std::string>> jobs;
  auto with = [&](nlohmann::json j, const nlohmann::json& extra) {
    j.merge_patch(extra);
    return j;
  };
  jobs.emplace_back("aggregate", write("agg.json", with(data, {{"t_ambiguity", 20}})));
  jobs.emplace_back("fit", write("fit.json", with(data, {{"lambda_ratio", 0.1}, {"dump_design", true}})));
  jobs.emplace_back("path", write("path.json", data));
  jobs.emplace_back("select", write("select.json", with(data, {{"fixed_effects", true}})));
  jobs.emplace_back("simulate", write("sim.json", {{"simulate", {{"p", 5}, {"edge_count", 4}, {"n_samples", 2000}}}}));
  jobs.emplace_back("simulate", led);
  jobs.emplace_back("evaluate", write("auc.json", {{"evaluate", {{"kind", "auc"}, {"scores", "scores.csv"}}}}));
  jobs.emplace_back("evaluate", write("adr.json", with(data, {{"evaluate", {{"kind", "adr"}, {"candidates", "cands.csv"}}}})));
  jobs.emplace_back("evaluate", write("sp.json", {{"n_lambdas", 10},
                                                   {"evaluate", {{"kind", "sparsistency"},
                                                                 {"sparsistency", {{"p", 4}, {"edge_count", 2}, {"sample_sizes", {200}}, {"trials", 2}, {"burn_in", 100}}}}}}));

  int identical = 0;
  std::string first_diff;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& [command, config] = jobs[k];
    const fs::path a = dir / ("run" + std::to_string(k) + "a");
    const fs::path b = dir / ("run" + std::to_string(k) + "b");
    const int ca = run_cli(command + " -c " + config + " --seed 3 --workers 1 --out " + a.string());
    const int cb = run_cli(command + " -c " + config + " --seed 3 --workers 1 --out " + b.string());
    bool same = ca == 0 && cb == 0;
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
    for (const auto& n : names) {
      if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
        same = false;
        if (first_diff.empty()) first_diff = command + ":" + n;
      }
    }
    if (ca != 0 && first_diff.empty()) first_diff = command + " exited " + std::to_string(ca);
    identical += same ? 1 : 0;
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(jobs.size()),
          std::to_string(identical) + "/" + std::to_string(jobs.size()) + " command reruns byte-identical" +
              (first_diff.empty() ? "" : " (first difference: " + first_diff + ")")};
}
#else
Outcome determinism() { return {false, "CLI not built"}; }
#endif

}  // namespace

int main(int argc, char** argv)
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"timespan aggregation of the two-subject fixture", aggregation_two_subject},
      {"analytic gradient versus finite differences", gradient_check},
      {"solver versus proximal-gradient reference and KKT audit", solver_oracle},
      {"lambda_max certification", lambda_max_certificate},
      {"exact conditionals and Gibbs slices", exact_consistency},
      {"empirical sparsistency", sparsistency},
      {"planted temporal-signal AUC", planted_auc},
      {"determinism of CLI reruns", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[k].first << " | "
              << out.detail << " [" << fmt(secs.count()) << " s]" << std::endl;
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
