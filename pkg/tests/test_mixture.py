import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import gaussian
import manifold
import mixture
from errors import ValidationError
from gaussian import GaussianParams
from manifold import Dataset, ManifoldId, ManifoldPoint
from mixture import EmConfig, MixtureModel, Responsibilities
from toeplitz import ToeplitzCoords

T4 = ManifoldId.toeplitz(4)


@pytest.fixture(scope="module")
def z4():
    return gaussian.build_ztable(T4)


def _point(r, alphas):
    m = ManifoldId.toeplitz(len(alphas) + 1)
    return ManifoldPoint.create(m, ToeplitzCoords.create(r, np.asarray(alphas, dtype=complex)))


def _concat(parts, labels):
    coords = ToeplitzCoords(
        np.concatenate([p.payload.r for p in parts]), np.concatenate([p.payload.alphas for p in parts])
    )
    return Dataset.create(parts[0].manifold, coords, labels)


@pytest.fixture(scope="module")
def centres():
    return _point(1.0, [0.0, 0.0, 0.0]), _point(1.0, [0.8, 0.0, 0.0])


@pytest.fixture(scope="module")
def two_clusters(centres):
    parts = [gaussian.sample(GaussianParams(c, 0.15), 300, seed=10 + k) for k, c in enumerate(centres)]
    return _concat(parts, np.repeat([0, 1], 300))


@pytest.fixture(scope="module")
def fitted(two_clusters, z4):
    return mixture.em_fit(two_clusters, 2, z4, EmConfig(restarts=3, seed=1))


def _model(centres, sigmas=(0.15, 0.15), weights=(0.5, 0.5)):
    return MixtureModel(T4, np.array(weights), tuple(GaussianParams(c, s) for c, s in zip(centres, sigmas)))


def test_model_validation(centres):
    with pytest.raises(ValidationError):
        _model(centres, weights=(0.5, 0.6))
    with pytest.raises(ValidationError):
        _model(centres, weights=(1.0, 0.0))
    other = GaussianParams(manifold.identity_point(ManifoldId.toeplitz(3)), 1.0)
    with pytest.raises(ValidationError):
        MixtureModel(T4, np.array([0.5, 0.5]), (GaussianParams(centres[0], 1.0), other))


def test_responsibilities_validation():
    with pytest.raises(ValidationError):
        Responsibilities(np.array([[0.5, 0.6]]))
    assert_allclose(Responsibilities(np.array([[0.25, 0.75], [1.0, 0.0]])).counts, [1.25, 0.75])


def test_single_component_responsibilities(two_clusters, centres, z4):
    model = MixtureModel(T4, np.array([1.0]), (GaussianParams(centres[0], 0.3),))
    assert_allclose(mixture.e_step(two_clusters, model, z4).matrix, 1.0)


def test_equidistant_point_splits_evenly():
    m = ManifoldId.toeplitz(2)
    z = gaussian.build_ztable(m)
    model = MixtureModel(
        m, np.array([0.5, 0.5]), (GaussianParams(_point(1.0, [0.5]), 0.4), GaussianParams(_point(1.0, [-0.5]), 0.4))
    )
    x = _point(1.0, [0.0])
    assert_allclose(mixture.posterior(x, model, z), [0.5, 0.5], atol=1e-12)
    assert mixture.error_probability(x, model, z) == pytest.approx(0.5)
    assert mixture.classify(x, model, z) == 0


def test_e_step_matches_direct_evaluation(two_clusters, centres, z4):
    model = _model(centres, sigmas=(0.2, 0.3), weights=(0.3, 0.7))
    resp = mixture.e_step(two_clusters, model, z4).matrix
    joint = np.stack(
        [math.log(w) + gaussian.log_pdf_many(two_clusters, c, z4) for w, c in zip(model.weights, model.components)],
        axis=1,
    )
    direct = np.exp(joint - joint.max(axis=1, keepdims=True))
    direct /= direct.sum(axis=1, keepdims=True)
    assert_allclose(resp, direct, atol=1e-12)
    assert_allclose(resp.sum(axis=1), 1.0, atol=1e-12)


def test_classify_is_the_bayes_rule(two_clusters, centres, z4):
    model = _model(centres, sigmas=(0.2, 0.3), weights=(0.3, 0.7))
    labels = mixture.classify_many(two_clusters, model, z4)
    assert_allclose(labels, np.argmax(mixture.e_step(two_clusters, model, z4).matrix, axis=1))
    np.testing.assert_array_equal(labels, mixture.classify_many(two_clusters, model, z4.shifted(-12.0)))
    assert mixture.classify_many(Dataset.empty(T4), model, z4).shape == (0,)


def test_relabel_keeps_the_density(two_clusters, centres, z4):
    model = _model(centres, sigmas=(0.2, 0.3), weights=(0.3, 0.7))
    swapped = mixture.relabel(model, [1, 0])
    assert_allclose(swapped.weights, [0.7, 0.3])
    assert_allclose(
        mixture.mixture_log_density_many(two_clusters, swapped, z4),
        mixture.mixture_log_density_many(two_clusters, model, z4),
    )
    with pytest.raises(ValidationError):
        mixture.relabel(model, [0, 0])


def test_m_step_with_hard_assignments_fits_each_cluster(two_clusters, z4):
    resp = Responsibilities(np.eye(2)[two_clusters.labels])
    model = mixture.m_step(two_clusters, resp, z4)
    assert_allclose(model.weights, [0.5, 0.5])
    for k in range(2):
        report = gaussian.mle_fit(two_clusters.subset(two_clusters.labels == k), z4)
        assert manifold.distance(model.centers[k], report.params.center) < 1e-7
        assert model.sigmas[k] == pytest.approx(report.params.sigma, rel=1e-7)


def test_m_step_reseeds_empty_component(two_clusters, z4, caplog):
    matrix = np.zeros((len(two_clusters), 2))
    matrix[:, 0] = 1.0
    model = mixture.m_step(two_clusters, Responsibilities(matrix), z4)
    assert model.K == 2
    assert np.all(model.weights > 0)
    assert model.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert "empty" in caplog.text


def test_em_recovers_two_clusters(fitted, centres):
    model, trace = fitted
    order = [int(np.argmin([manifold.distance(c, x) for x in model.centers])) for c in centres]
    assert sorted(order) == [0, 1]
    model = mixture.relabel(model, order)
    for k, c in enumerate(centres):
        assert manifold.distance(model.centers[k], c) < 0.1
    assert_allclose(model.weights, [0.5, 0.5], atol=0.05)
    assert_allclose(model.sigmas, [0.15, 0.15], atol=0.03)
    diffs = np.diff(trace)
    assert np.all(diffs >= -EmConfig().slack * np.maximum(1.0, np.abs(trace[:-1])))


def test_em_fixed_point_is_stationary(fitted, two_clusters, z4):
    model, _ = fitted
    again = mixture.m_step(two_clusters, mixture.e_step(two_clusters, model, z4), z4, prev=model)
    assert_allclose(again.weights, model.weights, atol=1e-6)
    assert_allclose(again.sigmas, model.sigmas, rtol=1e-6, atol=1e-6)
    for before, after in zip(model.centers, again.centers):
        assert manifold.distance(before, after) < 1e-6


def test_classification_agrees_with_truth(fitted, two_clusters, z4, centres):
    model, _ = fitted
    labels = mixture.classify_many(two_clusters, model, z4)
    table = mixture.confusion_matrix(two_clusters.labels, labels, 2)
    assert max(np.trace(table), np.trace(table[:, ::-1])) >= 0.99 * len(two_clusters)


def test_single_component_em_is_the_mle(two_clusters, z4):
    data = two_clusters.subset(two_clusters.labels == 0)
    model, trace = mixture.em_fit(data, 1, z4, EmConfig(restarts=2, seed=3))
    report = gaussian.mle_fit(data, z4)
    assert model.weights[0] == 1.0
    assert manifold.distance(model.centers[0], report.params.center) < 1e-7
    assert model.sigmas[0] == pytest.approx(report.params.sigma, rel=1e-7)
    assert len(trace) >= 2


def test_em_rejects_bad_order(two_clusters, z4):
    with pytest.raises(ValidationError):
        mixture.em_fit(two_clusters, 0, z4)
    with pytest.raises(ValidationError):
        mixture.em_fit(two_clusters.subset([0, 1]), 3, z4)


def test_bic(two_clusters, fitted, z4):
    model, _ = fitted
    assert mixture.degrees_of_freedom(T4, 2) == 17
    expected = mixture.mixture_log_likelihood(two_clusters, model, z4) - 8.5 * math.log(len(two_clusters))
    assert mixture.bic(two_clusters, model, z4) == pytest.approx(expected)


def test_order_selection_finds_two_clusters(two_clusters, z4):
    selection = mixture.select_order(two_clusters, 3, z4, EmConfig(restarts=3, seed=2))
    assert selection.best_k == 2
    assert selection.bics.shape == (3,)
    assert selection.best_model.K == 2
    assert len(selection.traces) == 3


def test_order_selection_prefers_one_component(centres, z4):
    data = gaussian.sample(GaussianParams(centres[1], 0.3), 500, seed=21)
    selection = mixture.select_order(data, 2, z4, EmConfig(restarts=2, seed=4))
    assert selection.best_k == 1


@pytest.mark.slow
def test_order_selection_is_rarely_fooled(centres, z4):
    wins = 0
    for seed in range(10):
        data = gaussian.sample(GaussianParams(centres[0], 0.3), 1000, seed=100 + seed)
        wins += mixture.select_order(data, 2, z4, EmConfig(restarts=3, seed=seed)).best_k == 1
    assert wins >= 9


def test_confusion_matrix():
    table = mixture.confusion_matrix(np.array([0, 0, 1, 2]), np.array([0, 1, 1, 2]))
    np.testing.assert_array_equal(table, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValidationError):
        mixture.confusion_matrix(np.array([0, 1]), np.array([0]))


def test_mixture_log_density_of_one_point(two_clusters, centres, z4):
    model = _model(centres, sigmas=(0.2, 0.3), weights=(0.3, 0.7))
    x = ManifoldPoint(T4, two_clusters.payload[5])
    terms = [math.log(w) + gaussian.log_pdf(x, c, z4) for w, c in zip(model.weights, model.components)]
    top = max(terms)
    expected = top + math.log(sum(math.exp(t - top) for t in terms))
    assert mixture.mixture_log_density(x, model, z4) == pytest.approx(expected, abs=1e-10)
