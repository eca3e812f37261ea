import numpy as np
import pytest

import tpsqr


def test_aggregate_runs():
    events = [(1, 1), (30, 1), (121, 2), (140, 2), (231, 3), (250, 3), (260, 3), (361, 1)]
    assert tpsqr.aggregate(events) == [(1, 1, 1), (121, 2, 1), (231, 3, 2), (361, 1, 0)]


def test_cross_type_tie_is_rejected():
    with pytest.raises(tpsqr.ValidationError, match="line"):
        tpsqr.aggregate_dataset([("a", 1.0, 1), ("a", 1.0, 2)], p=2)


def test_design_fit_and_template():
    seqs = tpsqr.aggregate_dataset(
        [("a", 0, 1), ("a", 5, 2), ("a", 40, 1), ("b", 0, 2), ("b", 3, 1), ("b", 9, 2), ("b", 9, 2)], p=2
    )
    prob = tpsqr.build_design(seqs, 2, [0, 10, 50])
    assert prob.cols == 2 * 2 * 2
    assert prob.x.shape == (prob.rows, prob.cols)
    lmax = tpsqr.lambda_max(prob)
    assert not tpsqr.fit(prob, lmax * 1.000001).active_set
    path = tpsqr.fit_path(prob, n_lambdas=5)
    k = tpsqr.select_aic_index(path)
    tmpl = tpsqr.to_template(prob, path.fits[k])
    assert tmpl.w.shape == (8,)
    assert tpsqr.score_pairs(tmpl).shape == (2, 2)


def test_psqr_oracle_and_graph_fit():
    model = tpsqr.random_sparse_model(4, 3, seed=1)
    samples = tpsqr.gibbs_sample(model, n_samples=500, burn_in=100, seed=2)
    assert samples.shape == (500, 4)
    assert np.array_equal(samples, tpsqr.gibbs_sample(model, n_samples=500, burn_in=100, seed=2))
    pmf = tpsqr.conditional_pmf(model, 0, [0, 1, 2, 0])
    assert pmf.sum() == pytest.approx(1.0)
    prob = tpsqr.build_graph_design(samples)
    fit = tpsqr.fit(prob, 0.5 * tpsqr.lambda_max(prob))
    theta = tpsqr.to_symmetric_theta(prob, fit)
    assert np.allclose(theta, theta.T)
    zero = tpsqr.PsqrModel(np.zeros((1, 1)))
    assert tpsqr.log_partition(zero) == pytest.approx(1.0)


def test_tail_violation_raises():
    with pytest.raises(tpsqr.NumericalError):
        tpsqr.log_partition(tpsqr.PsqrModel(np.array([[3.0]])), x_max=10)


def test_auc_and_led_pipeline():
    assert tpsqr.auc([0.9, 0.4, 0.6, 0.1], [True, False, True, False]) == 1.0
    bench = tpsqr.generate_led_benchmark(n_subjects=150, n_drugs=3, n_conditions=2, n_planted=2, seed=4)
    assert len(bench.candidates) == 6
    res = tpsqr.evaluate_candidate_pairs(bench.events, bench.p, bench.candidates)
    assert 0.0 <= res["auc"] <= 1.0
    assert len(res["scores"]) == 6
