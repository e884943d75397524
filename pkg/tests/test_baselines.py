import numpy as np
import pytest

from agrnn import (
    ConstantColumnWarning,
    Dataset,
    FriedmanSpec,
    InputError,
    cfs_merit,
    cfs_select,
    ftest_scores,
    make_friedman,
    mi_scores,
    rrelieff_scores,
    top_k,
)
from agrnn.baselines import F_SENTINEL


def dataset(X, y, names=None):
    return Dataset(
        features=np.asarray(X, float),
        target=np.asarray(y, float),
        feature_names=tuple(names) if names else (),
    )


class TestFtest:
    def test_perfect_correlation_hits_sentinel(self):
        x = np.linspace(0.0, 1.0, 50)
        scores = ftest_scores(dataset(x[:, None], x))
        assert scores.scores[0] == F_SENTINEL

    def test_exact_half_correlation_formula(self):
        """Constructed orthogonal components give r = 0.5 exactly."""
        n = 102
        x = np.zeros(n)
        z = np.zeros(n)
        x[0], x[1] = 1.0, -1.0
        z[2], z[3] = 1.0, -1.0
        y = x + np.sqrt(3.0) * z  # r(x, y) = 1 / sqrt(4) = 0.5
        scores = ftest_scores(dataset(x[:, None], y))
        assert scores.scores[0] == pytest.approx(0.25 * 100 / 0.75, rel=1e-9)

    def test_constant_feature_scores_zero_with_warning(self):
        X = np.column_stack([np.full(20, 3.0), np.linspace(0, 1, 20)])
        with pytest.warns(ConstantColumnWarning):
            scores = ftest_scores(dataset(X, np.linspace(0, 1, 20)))
        assert scores.scores[0] == 0.0
        assert scores.scores[1] == F_SENTINEL

    def test_independent_feature_below_monte_carlo_null_quantile(self):
        """Null F statistics bound scores of independent features."""
        n = 1000
        rng = np.random.default_rng(123)
        # Monte Carlo null: F statistics of 2000 independent (x, y) pairs
        Xnull = rng.normal(size=(n, 2000))
        ynull = rng.normal(size=n)
        null = ftest_scores(dataset(Xnull, ynull)).scores
        q99 = np.quantile(null, 0.99)
        hits = 0
        for trial in range(100):
            trng = np.random.default_rng(1000 + trial)
            score = ftest_scores(
                dataset(trng.uniform(size=(n, 1)), trng.uniform(size=n))
            ).scores[0]
            hits += score < q99
        assert hits >= 95

    def test_affine_target_rescaling_keeps_scores(self):
        rng = np.random.default_rng(5)
        X, y = rng.uniform(size=(60, 3)), rng.normal(size=60)
        a = ftest_scores(dataset(X, y)).scores
        b = ftest_scores(dataset(X, 3.5 * y + 11.0)).scores
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(6)
        X, y = rng.uniform(size=(80, 3)), rng.normal(size=80)
        perm = rng.permutation(80)
        a = ftest_scores(dataset(X, y)).scores
        b = ftest_scores(dataset(X[perm], y[perm])).scores
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_needs_three_rows(self):
        with pytest.raises(InputError):
            ftest_scores(dataset(np.zeros((2, 1)), np.zeros(2)))


class TestMutualInformation:
    def test_identity_map_approaches_log_bins(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(size=20000)
        scores = mi_scores(dataset(x[:, None], x), bins=10)
        assert scores.scores[0] == pytest.approx(np.log(10), rel=0.10)

    def test_independent_feature_below_permutation_null(self):
        rng = np.random.default_rng(8)
        x = rng.uniform(size=500)
        y = rng.uniform(size=500)
        observed = mi_scores(dataset(x[:, None], y)).scores[0]
        null = np.array(
            [
                mi_scores(dataset(x[:, None], np.random.default_rng(k).permutation(y))).scores[0]
                for k in range(200)
            ]
        )
        assert observed < np.quantile(null, 0.95)

    def test_constant_feature_gives_zero(self):
        scores = mi_scores(dataset(np.full((30, 1), 2.0), np.linspace(0, 1, 30)), bins=5)
        assert scores.scores[0] == 0.0

    def test_affine_target_rescaling_keeps_scores(self):
        rng = np.random.default_rng(9)
        X, y = rng.uniform(size=(100, 2)), rng.normal(size=100)
        a = mi_scores(dataset(X, y)).scores
        b = mi_scores(dataset(X, 2.0 * y - 7.0)).scores
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_requires_enough_rows(self):
        with pytest.raises(InputError):
            mi_scores(dataset(np.zeros((5, 1)), np.zeros(5)), bins=10)

    def test_scores_nonnegative(self):
        rng = np.random.default_rng(10)
        scores = mi_scores(dataset(rng.uniform(size=(200, 4)), rng.normal(size=200)))
        assert (scores.scores >= 0.0).all()


class TestCfs:
    def test_duplicate_of_relevant_feature_never_joins(self):
        rng = np.random.default_rng(11)
        x = rng.uniform(size=300)
        X = np.column_stack([x, x, rng.uniform(size=300)])
        selected = cfs_select(dataset(X, x, names=("x1", "copy", "noise")))
        assert selected == ["x1"]

    def test_single_relevant_feature(self):
        x = np.linspace(0.0, 1.0, 40)
        assert cfs_select(dataset(x[:, None], x, names=("x1",))) == ["x1"]

    def test_friedman_selection_includes_strong_linear_terms(self):
        data = make_friedman(FriedmanSpec(n=2000, d=30, noise_sd=0.0, seed=12))
        selected = cfs_select(data)
        assert "x4" in selected and "x5" in selected

    def test_merit_of_result_dominates_visited_sets(self):
        rng = np.random.default_rng(13)
        X = rng.uniform(size=(150, 6))
        y = X[:, 0] + 0.5 * X[:, 1] + 0.1 * rng.normal(size=150)
        data = dataset(X, y)
        selected = cfs_select(data)
        indices = [data.feature_names.index(name) for name in selected]

        corr_fy = np.abs(
            np.array([np.corrcoef(X[:, j], y)[0, 1] for j in range(6)])
        )
        corr_ff = np.abs(np.corrcoef(X.T))
        final = cfs_merit(corr_fy, corr_ff, indices)
        # replay the greedy search, collecting every candidate merit
        visited = []
        path: list[int] = []
        remaining = list(range(6))
        current = 0.0
        while remaining:
            merits = [(cfs_merit(corr_fy, corr_ff, path + [j]), j) for j in remaining]
            visited.extend(m for m, _ in merits)
            best, j = max(merits, key=lambda t: (t[0], -t[1]))
            if best <= current:
                break
            path.append(j)
            remaining.remove(j)
            current = best
        assert path == indices
        assert final >= max(visited) - 1e-12

    def test_all_constant_dataset_selects_nothing(self):
        with pytest.warns(ConstantColumnWarning):
            selected = cfs_select(dataset(np.ones((30, 3)), np.linspace(0, 1, 30)))
        assert selected == []


class TestRRelieff:
    def test_relevant_feature_outscores_noise(self):
        rng = np.random.default_rng(14)
        x = rng.uniform(size=500)
        X = np.column_stack([x, rng.uniform(size=500)])
        scores = rrelieff_scores(dataset(X, x), seed=0)
        assert scores.scores[0] > scores.scores[1]

    def test_duplicate_columns_get_equal_scores(self):
        rng = np.random.default_rng(15)
        x = rng.uniform(size=(300, 1))
        X = np.hstack([x, x, rng.uniform(size=(300, 1))])
        y = np.sin(4.0 * x[:, 0])
        scores = rrelieff_scores(dataset(X, y), seed=1)
        assert abs(scores.scores[0] - scores.scores[1]) < 1e-10

    def test_friedman_relevant_features_rank_first(self):
        data = make_friedman(FriedmanSpec(n=1500, d=15, noise_sd=0.0, seed=16))
        scores = rrelieff_scores(data, seed=2).scores
        assert scores[:5].min() > scores[5:].max()

    def test_row_permutation_invariance_full_sample(self):
        rng = np.random.default_rng(17)
        X, y = rng.uniform(size=(200, 3)), rng.normal(size=200)
        perm = rng.permutation(200)
        a = rrelieff_scores(dataset(X, y), seed=3).scores
        b = rrelieff_scores(dataset(X[perm], y[perm]), seed=3).scores
        np.testing.assert_allclose(a, b, rtol=1e-10)

    def test_subsampling_is_seeded(self):
        rng = np.random.default_rng(18)
        data = dataset(rng.uniform(size=(300, 3)), rng.normal(size=300))
        a = rrelieff_scores(data, sample_size=100, seed=4).scores
        b = rrelieff_scores(data, sample_size=100, seed=4).scores
        c = rrelieff_scores(data, sample_size=100, seed=5).scores
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_rejects_too_many_neighbors(self):
        rng = np.random.default_rng(19)
        data = dataset(rng.uniform(size=(10, 2)), rng.normal(size=10))
        with pytest.raises(InputError):
            rrelieff_scores(data, k_neighbors=10)

    def test_constant_target_warns_and_zeroes(self):
        rng = np.random.default_rng(20)
        data = dataset(rng.uniform(size=(50, 2)), np.full(50, 1.0))
        with pytest.warns(ConstantColumnWarning):
            scores = rrelieff_scores(data)
        np.testing.assert_array_equal(scores.scores, 0.0)


class TestTopK:
    def test_k_equals_d_returns_everything(self):
        rng = np.random.default_rng(21)
        scores = ftest_scores(dataset(rng.uniform(size=(30, 4)), rng.normal(size=30)))
        assert set(top_k(scores, 4)) == set(scores.feature_names)

    def test_k_one_picks_the_perfect_feature(self):
        x = np.linspace(0.0, 1.0, 30)
        X = np.column_stack([np.random.default_rng(22).uniform(size=30), x])
        scores = ftest_scores(dataset(X, x, names=("noise", "x1")))
        assert top_k(scores, 1) == ["x1"]

    def test_ties_break_by_column_order(self):
        from agrnn import ScoreVector

        scores = ScoreVector(
            method="ftest", scores=np.array([1.0, 2.0, 2.0]), feature_names=("a", "b", "c")
        )
        assert top_k(scores, 2) == ["b", "c"]

    def test_permutation_round_trip_stability(self):
        rng = np.random.default_rng(23)
        X, y = rng.uniform(size=(60, 5)), rng.normal(size=60)
        data = dataset(X, y)
        base = top_k(ftest_scores(data), 3)
        perm = [4, 2, 0, 3, 1]
        permuted = dataset(
            X[:, perm], y, names=tuple(data.feature_names[j] for j in perm)
        )
        assert set(top_k(ftest_scores(permuted), 3)) == set(base)

    def test_k_out_of_range(self):
        scores = ftest_scores(dataset(np.linspace(0, 1, 30)[:, None], np.zeros(30)))
        with pytest.raises(InputError):
            top_k(scores, 2)
        with pytest.raises(InputError):
            top_k(scores, 0)
