import itertools
import math

import numpy as np
import pytest

from riskcontext.errors import ConfigurationError, InputError
from riskcontext.explain import (
    Attribution,
    KernelSpec,
    aggregate_importance,
    kkt_residual,
    median_bandwidth,
    objective,
    protodash,
    rbf_kernel,
    shapley_exact,
    shapley_sampled,
    summarize_prototypes,
)


def brute_force_shapley(predict, x, reference, d):
    """Independent oracle: direct sum over all coalitions per feature."""
    phi = np.zeros(d)
    for i in range(d):
        others = [j for j in range(d) if j != i]
        for r in range(d):
            for subset in itertools.combinations(others, r):
                base = reference.copy()
                base[list(subset)] = x[list(subset)]
                with_i = base.copy()
                with_i[i] = x[i]
                weight = (
                    math.factorial(len(subset))
                    * math.factorial(d - len(subset) - 1)
                    / math.factorial(d)
                )
                phi[i] += weight * (
                    predict(with_i[None, :])[0] - predict(base[None, :])[0]
                )
    return phi


def random_mlp_predictor(rng, d, hidden=6):
    w1 = rng.normal(size=(d, hidden))
    b1 = rng.normal(size=hidden)
    w2 = rng.normal(size=hidden)

    def predict(batch):
        batch = np.atleast_2d(batch)
        h = np.maximum(batch @ w1 + b1, 0.0)
        return 1.0 / (1.0 + np.exp(-(h @ w2)))

    return predict


class TestShapleyExact:
    def test_linear_model(self):
        f = lambda batch: 2 * batch[:, 0] + 3 * batch[:, 1]
        at = shapley_exact(f, np.ones(2), np.zeros(2), feature_names=("a", "b"))
        np.testing.assert_allclose(at.phi, [2.0, 3.0], atol=1e-12)
        assert at.baseline_value == 0.0

    def test_constant_model(self):
        f = lambda batch: np.full(len(batch), 0.4)
        at = shapley_exact(f, np.ones(3), np.zeros(3))
        np.testing.assert_allclose(at.phi, 0.0, atol=1e-12)

    def test_symmetry(self):
        f = lambda batch: batch[:, 0] + batch[:, 1]
        at = shapley_exact(f, np.array([1.0, 1.0]), np.zeros(2))
        assert abs(at.phi[0] - at.phi[1]) < 1e-12

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        predict = random_mlp_predictor(rng, 5)
        x = rng.normal(size=5)
        reference = rng.normal(size=5)
        at = shapley_exact(predict, x, reference)
        expected = brute_force_shapley(predict, x, reference, 5)
        np.testing.assert_allclose(at.phi, expected, atol=1e-10)

    def test_efficiency(self):
        rng = np.random.default_rng(6)
        predict = random_mlp_predictor(rng, 6)
        x = rng.normal(size=6)
        reference = rng.normal(size=6)
        at = shapley_exact(predict, x, reference)
        gap = predict(x[None, :])[0] - predict(reference[None, :])[0]
        assert abs(at.phi.sum() - gap) < 1e-6

    def test_null_player(self):
        rng = np.random.default_rng(7)
        predict = random_mlp_predictor(rng, 4)
        reference = rng.normal(size=4)
        x = reference.copy()
        x[1] = reference[1] + 2.0  # only feature 1 differs
        at = shapley_exact(predict, x, reference)
        for i in (0, 2, 3):
            assert abs(at.phi[i]) < 1e-12

    def test_feature_subset(self):
        f = lambda batch: batch[:, 0] + 10 * batch[:, 1]
        at = shapley_exact(f, np.ones(2), np.zeros(2), feature_subset=[0])
        assert at.phi[1] == 0.0
        assert abs(at.phi[0] - 1.0) < 1e-12
        # baseline holds non-players at x
        assert abs(at.baseline_value - 10.0) < 1e-12

    def test_cap(self):
        f = lambda batch: batch.sum(axis=1)
        with pytest.raises(ConfigurationError, match="shapley_sampled"):
            shapley_exact(f, np.ones(25), np.zeros(25))

    def test_mismatched_shapes(self):
        f = lambda batch: batch.sum(axis=1)
        with pytest.raises(InputError):
            shapley_exact(f, np.ones(3), np.zeros(4))


class TestShapleySampled:
    def test_close_to_exact(self):
        rng = np.random.default_rng(8)
        predict = random_mlp_predictor(rng, 8)
        x = rng.normal(size=8)
        reference = rng.normal(size=8)
        exact = shapley_exact(predict, x, reference)
        sampled = shapley_sampled(predict, x, reference, n_samples=20000, seed=3)
        assert np.max(np.abs(sampled.phi - exact.phi)) < 0.01

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(9)
        predict = random_mlp_predictor(rng, 5)
        x, reference = rng.normal(size=5), rng.normal(size=5)
        a = shapley_sampled(predict, x, reference, n_samples=500, seed=1)
        b = shapley_sampled(predict, x, reference, n_samples=500, seed=1)
        np.testing.assert_array_equal(a.phi, b.phi)

    def test_reference_equals_x(self):
        rng = np.random.default_rng(10)
        predict = random_mlp_predictor(rng, 5)
        x = rng.normal(size=5)
        at = shapley_sampled(predict, x, x.copy(), n_samples=200, seed=0)
        np.testing.assert_allclose(at.phi, 0.0, atol=1e-12)

    def test_min_samples(self):
        f = lambda batch: batch.sum(axis=1)
        with pytest.raises(ConfigurationError):
            shapley_sampled(f, np.ones(3), np.zeros(3), n_samples=50, seed=0)

    def test_reports_standard_errors(self):
        rng = np.random.default_rng(11)
        predict = random_mlp_predictor(rng, 4)
        at = shapley_sampled(
            predict, rng.normal(size=4), rng.normal(size=4), n_samples=300, seed=2
        )
        assert at.standard_errors is not None and np.all(at.standard_errors >= 0)


def best_pair_objective_oracle(candidates, target, bandwidth):
    """Closed-form 2x2 nonnegative QP over every candidate pair."""

    def kernel(a, b):
        d2 = np.sum((a - b) ** 2)
        return math.exp(-d2 / (2 * bandwidth**2))

    n = len(candidates)
    mu = np.array(
        [np.mean([kernel(t, c) for t in target]) for c in candidates]
    )
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            k11 = kernel(candidates[i], candidates[i])
            k22 = kernel(candidates[j], candidates[j])
            k12 = kernel(candidates[i], candidates[j])
            m1, m2 = mu[i], mu[j]
            values = [0.0]
            det = k11 * k22 - k12 * k12
            if det > 1e-12:
                w1 = (k22 * m1 - k12 * m2) / det
                w2 = (k11 * m2 - k12 * m1) / det
                if w1 >= 0 and w2 >= 0:
                    values.append(
                        m1 * w1
                        + m2 * w2
                        - 0.5 * (k11 * w1**2 + 2 * k12 * w1 * w2 + k22 * w2**2)
                    )
            if m1 > 0:
                values.append(0.5 * m1**2 / k11)
            if m2 > 0:
                values.append(0.5 * m2**2 / k22)
            best = max(best, max(values))
    return best


class TestProtodash:
    def test_identical_candidates_k1(self):
        rows = np.tile(np.array([1.0, 2.0]), (5, 1))
        proto = protodash(rows, rows, 1, KernelSpec(bandwidth=1.0))
        assert len(proto.indices) == 1
        assert proto.weights[0] >= 0

    def test_two_clusters_one_prototype_each(self):
        rng = np.random.default_rng(12)
        a = rng.normal(0.0, 0.3, size=(20, 2))
        b = rng.normal(0.0, 0.3, size=(20, 2)) + 12.0
        rows = np.vstack([a, b])
        proto = protodash(rows, rows, 2)
        sides = {int(i >= 20) for i in proto.indices}
        assert sides == {0, 1}

    def test_greedy_near_brute_force(self):
        rng = np.random.default_rng(13)
        for trial in range(10):
            rows = rng.normal(size=(30, 3))
            bandwidth = median_bandwidth(rows)
            proto = protodash(rows, rows, 2, KernelSpec(bandwidth=bandwidth))
            gram = rbf_kernel(rows[proto.indices], rows[proto.indices], bandwidth)
            mu = rbf_kernel(rows, rows[proto.indices], bandwidth).mean(axis=0)
            greedy = objective(proto.weights, gram, mu)
            best = best_pair_objective_oracle(rows, rows, bandwidth)
            assert greedy >= 0.95 * best, (trial, greedy, best)

    def test_trace_nondecreasing_and_kkt(self):
        rng = np.random.default_rng(14)
        rows = rng.normal(size=(25, 4))
        proto = protodash(rows, rows, 6)
        trace = proto.objective_trace
        assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))
        assert np.all(proto.weights >= 0)
        assert kkt_residual(proto, rows, rows) < 1e-6

    def test_scale_invariance_of_selection(self):
        rng = np.random.default_rng(15)
        rows = rng.normal(size=(20, 3))
        bandwidth = median_bandwidth(rows)
        a = protodash(rows, rows, 3, KernelSpec(bandwidth=bandwidth))
        scale = 7.5
        b = protodash(rows * scale, rows * scale, 3, KernelSpec(bandwidth=bandwidth * scale))
        assert a.indices == b.indices

    def test_k_too_large(self):
        rows = np.zeros((3, 2))
        with pytest.raises(InputError):
            protodash(rows, rows, 4)

    def test_empty_inputs(self):
        with pytest.raises(InputError):
            protodash(np.zeros((0, 2)), np.zeros((1, 2)), 1)


def _attribution(pid, phi, names=("f1", "f2")):
    return Attribution(
        patient_id=pid,
        baseline_value=0.0,
        phi=np.array(phi, dtype=float),
        method="exact",
        feature_names=tuple(names),
    )


class TestAggregate:
    def test_single_attribution_ranking(self):
        ranked = aggregate_importance([_attribution("p", [0.3, -0.5])])
        assert [r.feature for r in ranked] == ["f2", "f1"]
        assert ranked[0].mean_abs_phi == 0.5

    def test_mean_abs(self):
        ranked = aggregate_importance(
            [_attribution("a", [0.2, 0.0]), _attribution("b", [-0.2, 0.0])]
        )
        by_name = {r.feature: r.mean_abs_phi for r in ranked}
        assert by_name["f1"] == 0.2 and by_name["f2"] == 0.0

    def test_top_n_clamps(self):
        ranked = aggregate_importance([_attribution("p", [0.1, 0.2])], top_n=10)
        assert len(ranked) == 2

    def test_mismatched_orderings_rejected(self):
        with pytest.raises(InputError):
            aggregate_importance(
                [_attribution("a", [0.1, 0.2]), _attribution("b", [0.1, 0.2], names=("x", "y"))]
            )

    def test_permutation_invariant(self):
        a = _attribution("a", [0.5, 0.1])
        b = _attribution("b", [-0.3, 0.4])
        r1 = aggregate_importance([a, b])
        r2 = aggregate_importance([b, a])
        assert [x.feature for x in r1] == [x.feature for x in r2]
        assert [x.mean_abs_phi for x in r1] == [x.mean_abs_phi for x in r2]

    def test_presence_flags_from_rows(self):
        rows = np.array([[1.0, 0.0]])
        ranked = aggregate_importance([_attribution("p", [0.3, -0.5])], rows=rows)
        by_name = {r.feature: r.spread for r in ranked}
        assert by_name["f1"][0] == (0.3, True)
        assert by_name["f2"][0] == (-0.5, False)


class TestSerialization:
    def test_attribution_round_trip(self):
        rng = np.random.default_rng(21)
        predict = random_mlp_predictor(rng, 4)
        at = shapley_sampled(
            predict, rng.normal(size=4), rng.normal(size=4),
            n_samples=200, seed=9, patient_id="p9", feature_names=("a", "b", "c", "d"),
        )
        clone = Attribution.from_dict(at.to_dict())
        np.testing.assert_array_equal(clone.phi, at.phi)
        np.testing.assert_array_equal(clone.standard_errors, at.standard_errors)
        assert (clone.patient_id, clone.method, clone.seed) == ("p9", "sampled", 9)

    def test_prototype_set_round_trip(self):
        rng = np.random.default_rng(22)
        rows = rng.normal(size=(12, 3))
        proto = protodash(rows, rows, 3)
        clone = type(proto).from_dict(proto.to_dict())
        assert clone.indices == proto.indices
        np.testing.assert_array_equal(clone.weights, proto.weights)
        assert clone.kernel_spec == proto.kernel_spec


class TestSummary:
    def _matrix(self):
        names = ["CCS_001", "CCS_002", "AGE_GRP_Y", "AGE_GRP_M", "AGE_GRP_O", "SEX_FEMALE"]
        labels = {"CCS_001": "Endocrine group", "CCS_002": "Endocrine group"}
        rows = np.zeros((20, 6))
        rows[:15, 4] = 1  # 15 in AGE_GRP_O
        rows[15:19, 3] = 1
        rows[19, 2] = 1
        rows[:, 0] = 1  # everyone has an endocrine indicator
        rows[:7, 5] = 1
        return rows, names, labels

    def test_counts_and_formatting(self):
        rows, names, labels = self._matrix()
        summary = summarize_prototypes(rows, names, labels)
        by_label = {r.label: r for r in summary.rows}
        assert summary.n == 20
        assert by_label["AGE_GRP_O"].formatted() == "15 (75.0)"
        assert by_label["Endocrine group"].formatted() == "20 (100.0)"
        assert by_label["Endocrine group"].high_prevalence
        assert by_label["SEX - FEMALE"].formatted() == "7 (35.0)"
        assert not by_label["SEX - FEMALE"].high_prevalence

    def test_zero_count_row(self):
        rows, names, labels = self._matrix()
        rows[:, 0] = 0
        summary = summarize_prototypes(rows, names, labels)
        row = {r.label: r for r in summary.rows}["Endocrine group"]
        assert row.formatted() == "0 (0.0)" and not row.high_prevalence

    def test_group_rollup_counts_patients_once(self):
        names = ["CCS_001", "CCS_002"]
        labels = {"CCS_001": "G", "CCS_002": "G"}
        rows = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        summary = summarize_prototypes(rows, names, labels)
        row = {r.label: r for r in summary.rows}["G"]
        assert row.count == 2 and row.percentage == 50.0

    def test_percentages_recompute_from_counts(self):
        rows, names, labels = self._matrix()
        summary = summarize_prototypes(rows, names, labels)
        for row in summary.rows:
            assert row.percentage == round(100.0 * row.count / summary.n, 1)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize_prototypes(np.zeros((0, 2)), ["a", "b"], {})
