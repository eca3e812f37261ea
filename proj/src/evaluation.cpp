#include "tpsqr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tpsqr/errors.hpp"
#include "tpsqr/parallel.hpp"

namespace tpsqr {

PairScoreTable score_pairs(const Template& tmpl)
{
  tmpl.validate();
  PairScoreTable table;
  table.p = tmpl.p;
  table.scores = Eigen::MatrixXd::Zero(tmpl.p, tmpl.p);
  for (int k = 1; k <= tmpl.p; ++k) {
    for (int k2 = 1; k2 <= tmpl.p; ++k2) {
      double s = 0.0;
      for (int l = 1; l <= tmpl.L; ++l) s += tmpl.weight(k, k2, l);
      table.scores(k - 1, k2 - 1) = s / tmpl.L;
    }
  }
  return table;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels)
{
  if (scores.size() != labels.size()) throw ValidationError("auc: scores and labels differ in length");
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg).push_back(scores[i]);
  if (pos.empty()) throw ValidationError("auc: no positive labels");
  if (neg.empty()) throw ValidationError("auc: no negative labels");

  double wins = 0.0;
  for (double sp : pos) {
    for (double sn : neg) {
      if (sp > sn) {
        wins += 1.0;
      } else if (sp == sn) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

EdgeSet support(const Eigen::MatrixXd& theta)
{
  EdgeSet edges;
  for (Eigen::Index j = 0; j < theta.rows(); ++j) {
    for (Eigen::Index k = j + 1; k < theta.cols(); ++k) {
      if (theta(j, k) != 0.0) edges.emplace(static_cast<int>(j), static_cast<int>(k));
    }
  }
  return edges;
}

EdgeRecoveryReport edge_recovery(const EdgeSet& truth, const EdgeSet& recovered)
{
  EdgeRecoveryReport r;
  r.true_edges = truth;
  r.recovered_edges = recovered;
  std::size_t hits = 0;
  for (const auto& e : recovered) hits += truth.count(e);
  r.precision = recovered.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(recovered.size());
  r.recall = truth.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.exact_structure_match = truth == recovered;
  return r;
}

Quantiles quantiles(std::vector<double> values)
{
  if (values.empty()) throw std::invalid_argument("quantiles: empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

SparsistencyResult sparsistency_experiment(const SparsistencyConfig& config)
{
  if (config.sample_sizes.empty() || config.trials < 1) {
    throw std::invalid_argument("sparsistency_experiment: need sample sizes and trials >= 1");
  }
  const auto n_sizes = config.sample_sizes.size();
  const auto n_trials = static_cast<std::size_t>(config.trials);

  SparsistencyResult result;
  result.trials.resize(n_sizes * n_trials);
  parallel_for(result.trials.size(), config.workers, [&](std::size_t task) {
    const int n = config.sample_sizes[task / n_trials];
    const auto trial = static_cast<int>(task % n_trials);
    const auto model = random_sparse_model(config.p, config.edge_count,
                                           derive_seed(config.seed, static_cast<std::uint64_t>(trial)),
                                           config.trunc);
    GibbsConfig gibbs;
    gibbs.n_samples = n;
    gibbs.burn_in = config.burn_in;
    gibbs.thin = config.thin;
    gibbs.trunc = config.trunc;
    gibbs.seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(n));
    const auto samples = gibbs_sample(model, gibbs);

    const auto problem = build_graph_design(samples);
    const auto path = fit_path(problem, config.n_lambdas, config.lambda_min_ratio, config.fit);
    const auto& chosen = path.fits[select_aic_index(path)];

    auto& out = result.trials[task];
    out.n = n;
    out.trial = trial;
    out.selected_lambda = chosen.lambda;
    out.report = edge_recovery(support(model.theta()), support(to_symmetric_theta(problem, chosen)));
  });

  for (std::size_t s = 0; s < n_sizes; ++s) {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    double exact = 0.0;
    double empty = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const auto& rep = result.trials[s * n_trials + t].report;
      precision.push_back(rep.precision);
      recall.push_back(rep.recall);
      f1.push_back(rep.f1);
      exact += rep.exact_structure_match ? 1.0 : 0.0;
      empty += rep.recovered_edges.empty() ? 1.0 : 0.0;
    }
    SparsistencySummary summary;
    summary.n = config.sample_sizes[s];
    summary.precision = quantiles(precision);
    summary.recall = quantiles(recall);
    summary.f1 = quantiles(f1);
    summary.exact_match_rate = exact / static_cast<double>(n_trials);
    summary.empty_recovery_rate = empty / static_cast<double>(n_trials);
    result.per_n.push_back(summary);
  }
  return result;
}

LedBenchmark generate_led_benchmark(const LedBenchmarkConfig& cfg)
{
  if (cfg.n_subjects < 1 || cfg.n_drugs < 1 || cfg.n_conditions < 1 || cfg.n_planted < 0 ||
      cfg.n_planted > cfg.n_drugs * cfg.n_conditions || !(cfg.max_length >= cfg.min_length) ||
      !(cfg.min_length > 0.0)) {
    throw std::invalid_argument("generate_led_benchmark: invalid configuration");
  }
  std::mt19937_64 rng(cfg.seed);

  LedBenchmark bench;
  bench.p = cfg.n_drugs + cfg.n_conditions;
  for (int d = 1; d <= cfg.n_drugs; ++d) {
    for (int c = 1; c <= cfg.n_conditions; ++c) bench.candidates.push_back({d, cfg.n_drugs + c, false});
  }
  {
    std::vector<std::size_t> order(bench.candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < cfg.n_planted; ++k) bench.candidates[order[static_cast<std::size_t>(k)]].planted = true;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> frailty(cfg.frailty_shape, 1.0 / cfg.frailty_shape);
  std::geometric_distribution<int> refills(1.0 / (1.0 + cfg.refill_mean));
  std::geometric_distribution<int> repeats(1.0 / (1.0 + cfg.condition_repeat_mean));
  std::poisson_distribution<int> excess(cfg.excess_mean);

  std::vector<double> baseline(static_cast<std::size_t>(cfg.n_conditions));
  for (auto& b : baseline) b = cfg.condition_rate * (0.5 + unit(rng));
  std::vector<double> drug_rate(static_cast<std::size_t>(cfg.n_drugs));
  for (auto& r : drug_rate) r = cfg.drug_episode_rate * (0.5 + unit(rng));

  for (int s = 0; s < cfg.n_subjects; ++s) {
    const std::string id = "S" + std::to_string(s + 1);
    const double length = cfg.min_length + (cfg.max_length - cfg.min_length) * unit(rng);
    const double u = frailty(rng);
    std::vector<EventRecord> events;

    auto add_condition_episode = [&](int type, double start) {
      const int extra = repeats(rng);
      for (int k = 0; k <= extra; ++k) {
        const double t = start + k * cfg.repeat_gap * (0.5 + unit(rng));
        if (t < length) events.push_back({id, t, type, 0});
      }
    };

    for (int d = 1; d <= cfg.n_drugs; ++d) {
      std::poisson_distribution<int> episodes(drug_rate[static_cast<std::size_t>(d - 1)] * std::sqrt(u) * length);
      const int n_episodes = episodes(rng);
      for (int e = 0; e < n_episodes; ++e) {
        const double start = length * unit(rng);
        const int fills = 1 + refills(rng);
        for (int f = 0; f < fills; ++f) {
          const double t = start + f * cfg.refill_gap * (0.8 + 0.4 * unit(rng));
          if (t >= length) break;
          events.push_back({id, t, d, 0});
          for (const auto& cand : bench.candidates) {
            if (!cand.planted || cand.drug != d) continue;
            const int n_extra = excess(rng);
            for (int k = 0; k < n_extra; ++k) add_condition_episode(cand.condition, t + cfg.risk_window * unit(rng));
          }
        }
      }
    }
    for (int c = 0; c < cfg.n_conditions; ++c) {
      std::poisson_distribution<int> episodes(baseline[static_cast<std::size_t>(c)] * u * length);
      const int n_episodes = episodes(rng);
      for (int e = 0; e < n_episodes; ++e) add_condition_episode(cfg.n_drugs + c + 1, length * unit(rng));
    }

    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    bench.events.insert(bench.events.end(), events.begin(), events.end());
  }
  return bench;
}

PairEvaluation evaluate_candidate_pairs(std::span<const EventRecord> events, int p,
                                        std::span<const CandidatePair> candidates,
                                        const PipelineConfig& config)
{
  const LagWindows windows(config.thresholds);
  const auto sequences = aggregate_dataset(events, p, config.aggregate);
  const auto problem = build_design(sequences, p, windows, config.design);

  PairEvaluation out;
  out.path = fit_path(problem, config.n_lambdas, config.lambda_min_ratio, config.fit);
  out.selected = select_aic_index(out.path);
  out.tmpl = to_template(problem, out.path.fits[out.selected]);

  const auto table = score_pairs(out.tmpl);
  std::vector<bool> labels;
  for (const auto& c : candidates) {
    out.candidate_scores.push_back(table.score(c.drug, c.condition));
    labels.push_back(c.planted);
  }
  out.auc = auc(out.candidate_scores, labels);
  return out;
}

}  // namespace tpsqr
