import numpy as np
import pytest
from scipy.integrate import simpson

from gausset import (
    ClassPrior,
    LabeledDataset,
    PosteriorMNW,
    PriorHyper,
    accumulate,
    add_empty_class,
    build_model,
    class_posterior,
    decide,
    log_predictive,
    log_predictive_unnormalized,
    posterior,
    posterior_from_scores,
    score_batch,
    zero_one_costs,
)
from gausset.errors import (
    AllZeroPrior,
    DegenerateScatter,
    DimensionMismatch,
    InsufficientDof,
    ShapeMismatch,
)
from gausset.linalg import log_gamma


@pytest.fixture
def worked_model(worked_posterior):
    return build_model(worked_posterior, class_names=("a", "b"))


class TestBuildModel:
    def test_worked_log_normalizers(self, worked_model):
        # a* = 3, N = 1: the gamma pair is log Gamma(2) - log Gamma(3/2).
        for k, c in enumerate((1.0 / 3.0, 1.0 / 2.0)):
            expected = (log_gamma(2.0) - log_gamma(1.5)
                        - 0.5 * np.log(np.pi * (c + 1.0))
                        - 0.5 * np.log(20.0 / 3.0))
            assert worked_model.log_norm[k] == pytest.approx(expected, abs=1e-14)

    def test_minimal_degrees_of_freedom(self):
        # a* + 1 - N = 1 > 0 is enough.
        post = PosteriorMNW(np.zeros((1, 1)), [1.0], 1.0, np.eye(1), source_r=1.0)
        model = build_model(post)
        assert np.isfinite(log_predictive(model, [0.3], 0))

    def test_insufficient_dof(self):
        post = PosteriorMNW(np.zeros((3, 1)), [1.0], 2.0, np.eye(3), source_r=1.0)
        with pytest.raises(InsufficientDof):
            build_model(post)

    def test_degenerate_scatter_single_point(self):
        # One 2-D training point under the non-informative prior leaves a
        # rank-deficient B*.
        ds = LabeledDataset(np.array([[1.0, 2.0]]), [0], ("a",))
        post = posterior(accumulate(ds), PriorHyper.noninformative(1.0))
        with pytest.raises(DegenerateScatter):
            build_model(post)

    def test_class_name_default_and_mismatch(self, worked_posterior):
        assert build_model(worked_posterior).class_names == ("class_0", "class_1")
        with pytest.raises(ShapeMismatch):
            build_model(worked_posterior, class_names=("only_one",))


class TestLogPredictive:
    def test_maximum_at_location(self, worked_model):
        # Unimodal with mode at mu*_k.
        mu = worked_model.mu_star[0, 0]
        at_mode = log_predictive(worked_model, [mu], 0)
        for x in np.linspace(mu - 5.0, mu + 5.0, 41):
            if abs(x - mu) > 1e-12:
                assert log_predictive(worked_model, [x], 0) < at_mode

    def test_matches_reference_student_t(self):
        # N = 1, K = 1, non-informative prior with r ~ 0: the predictive is
        # a location-scale Student-t with nu = a*, checked against scipy.
        from scipy.stats import t as student_t
        rng = np.random.default_rng(12)
        xs = rng.normal(2.0, 1.5, size=8)
        ds = LabeledDataset(xs[:, None], np.zeros(8, dtype=int), ("only",))
        post = posterior(accumulate(ds), PriorHyper.noninformative(1e-12))
        model = build_model(post)
        mu, c = float(post.m_star[0, 0]), float(1.0 / post.r_star_diag[0])
        scale = np.sqrt((c + 1.0) * post.b_star[0, 0] / post.a_star)
        for x in np.linspace(mu - 6 * scale, mu + 6 * scale, 25):
            assert log_predictive(model, [x], 0) == pytest.approx(
                student_t.logpdf(x, df=post.a_star, loc=mu, scale=scale), abs=1e-9
            )

    def test_monotone_decay_along_direction(self):
        rng = np.random.default_rng(13)
        ds = LabeledDataset(rng.normal(size=(15, 2)), rng.integers(0, 2, 15),
                            ("a", "b"))
        model = build_model(posterior(accumulate(ds), PriorHyper.noninformative(1.0)))
        direction = np.array([0.6, -0.8])
        mu = model.mu_star[:, 0]
        values = [log_predictive(model, mu + t * direction, 0)
                  for t in np.linspace(0.0, 8.0, 30)]
        assert np.all(np.diff(values) < 0)

    def test_normalizes_to_one_in_1d(self, worked_model):
        for k in range(2):
            mu = worked_model.mu_star[0, k]
            scale = np.sqrt((worked_model.c_star[k] + 1.0)
                            * worked_model.b_star[0, 0] / worked_model.a_star)
            grid = np.linspace(mu - 40 * scale, mu + 40 * scale, 100001)
            density = np.exp([log_predictive(worked_model, [x], k) for x in grid])
            assert simpson(density, x=grid) == pytest.approx(1.0, abs=1e-4)

    def test_dimension_mismatch(self, worked_model):
        with pytest.raises(DimensionMismatch):
            log_predictive(worked_model, [1.0, 2.0], 0)
        with pytest.raises(IndexError):
            log_predictive(worked_model, [1.0], 5)


class TestLogPredictiveUnnormalized:
    def test_worked_value_at_location(self, worked_model):
        # d = 0 kills the tail term, leaving -(1/2) log(c*_1 + 1).
        assert log_predictive_unnormalized(worked_model, [4.0 / 3.0], 0) == (
            pytest.approx(-0.5 * np.log(4.0 / 3.0), abs=1e-14)
        )

    def test_offset_from_normalized_is_class_independent(self, worked_model):
        rng = np.random.default_rng(14)
        for x in rng.normal(1.5, 2.0, size=6):
            diffs = [log_predictive(worked_model, [x], k)
                     - log_predictive_unnormalized(worked_model, [x], k)
                     for k in range(2)]
            assert max(diffs) - min(diffs) < 1e-12

    def test_equal_inputs_give_equal_scores(self):
        # Two classes with the same c* and the same distance score equally.
        post = PosteriorMNW(np.array([[1.0, -1.0]]), [2.0, 2.0], 4.0,
                            np.array([[3.0]]), source_r=1.0)
        model = build_model(post)
        assert log_predictive_unnormalized(model, [0.0], 0) == (
            log_predictive_unnormalized(model, [0.0], 1)
        )


class TestClassPosterior:
    def test_symmetric_classes_split_evenly(self):
        post = PosteriorMNW(np.array([[1.0, 1.0]]), [2.0, 2.0], 4.0,
                            np.array([[3.0]]), source_r=1.0)
        model = build_model(post)
        probs = class_posterior(model, [0.7], ClassPrior.uniform(2))
        np.testing.assert_allclose(probs, [0.5, 0.5], atol=1e-15)

    def test_degenerate_prior_wins_regardless_of_data(self, worked_model):
        for x in (-10.0, 0.0, 10.0):
            probs = class_posterior(worked_model, [x], [1.0, 0.0])
            np.testing.assert_array_equal(probs, [1.0, 0.0])

    def test_point_to_the_right_prefers_larger_mean(self, worked_model):
        # mu*_a = 4/3 > mu*_b = 1, so a wins to the right of both means.
        # Not arbitrarily far right: b's larger c* widens its scale and
        # takes over again beyond x ~ 9.2, so probe at x = 5.
        probs = class_posterior(worked_model, [5.0], ClassPrior.uniform(2))
        assert probs[0] > 0.5

    def test_sums_to_one(self, worked_model):
        rng = np.random.default_rng(15)
        for x in rng.normal(0, 3, size=10):
            probs = class_posterior(worked_model, [x], ClassPrior.uniform(2))
            assert abs(probs.sum() - 1.0) < 1e-12

    def test_all_zero_prior(self, worked_model):
        with pytest.raises(AllZeroPrior):
            class_posterior(worked_model, [1.0], [0.0, 0.0])

    def test_shift_invariance(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            scores = rng.normal(size=4)
            prior = ClassPrior(np.full(4, 0.25))
            base = posterior_from_scores(scores, prior)
            for shift in (-1000.0, -3.5, 700.0):
                shifted = posterior_from_scores(scores + shift, prior)
                np.testing.assert_allclose(shifted, base, atol=1e-12)


class TestClassPrior:
    def test_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ClassPrior(np.array([0.5, 0.6]))

    def test_no_negative_entries(self):
        with pytest.raises(ValueError):
            ClassPrior(np.array([1.5, -0.5]))

    def test_uniform(self):
        np.testing.assert_allclose(ClassPrior.uniform(4).probs, np.full(4, 0.25))


class TestDecide:
    def test_zero_one_costs_pick_argmax(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            raw = rng.random(4)
            probs = raw / raw.sum()
            assert decide(probs, zero_one_costs(4)) == int(np.argmax(probs))

    def test_constant_costs_tie_break_to_lowest_index(self):
        assert decide([0.3, 0.7], np.full((2, 3), 2.0)) == 0

    def test_worked_expected_costs(self):
        # Expected costs are (0.1, 9.0), so the first action wins.
        assert decide([0.9, 0.1], np.array([[0.0, 10.0], [1.0, 0.0]])) == 0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            decide([0.5, 0.5], np.zeros((3, 2)))

    def test_nonfinite_costs_rejected(self):
        with pytest.raises(ValueError):
            decide([0.5, 0.5], np.array([[0.0, np.inf], [1.0, 0.0]]))


class TestOpensetScoring:
    def test_empty_class_score_grows_with_shrinkage(self):
        # Per-class sums are exactly zero, so B* does not move with r and
        # the empty class's c* = 1/r alone drives its density at zero.
        rng = np.random.default_rng(18)
        half = rng.normal(0.0, 1.0, size=(6, 2))
        patterns = np.vstack([half, -half])
        labels = np.tile(np.repeat([0, 1], 3), 2)
        ds = LabeledDataset(patterns, labels, ("a", "b"))
        stats = accumulate(ds)
        assert np.abs(stats.f).max() < 1e-12
        scores = []
        for r in (1.0, 10.0, 100.0):
            post = add_empty_class(posterior(stats, PriorHyper.noninformative(r)))
            model = build_model(post, class_names=("a", "b", "other"))
            scores.append(log_predictive(model, [0.0, 0.0], 2))
        assert np.all(np.isfinite(scores))
        assert scores[0] < scores[1] < scores[2]


class TestScoreBatch:
    def test_matches_single_pattern_calls(self, worked_model):
        rng = np.random.default_rng(19)
        patterns = rng.normal(0, 2, size=(7, 1))
        log_unnorm, posteriors, actions = score_batch(
            worked_model, patterns, ClassPrior.uniform(2)
        )
        for i, x in enumerate(patterns):
            for k in range(2):
                assert log_unnorm[i, k] == log_predictive_unnormalized(
                    worked_model, x, k
                )
            np.testing.assert_array_equal(
                posteriors[i], class_posterior(worked_model, x, ClassPrior.uniform(2))
            )
            assert actions[i] == decide(posteriors[i], zero_one_costs(2))

    def test_rejects_wrong_width(self, worked_model):
        with pytest.raises(DimensionMismatch):
            score_batch(worked_model, np.zeros((3, 2)), ClassPrior.uniform(2))
