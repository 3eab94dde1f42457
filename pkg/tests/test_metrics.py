import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uqbench import oracles
from uqbench.errors import ScoreRangeError, UQBenchError
from uqbench.kappa import ScoreVector
from uqbench.metrics import (
    Undefined,
    aurc,
    aurc_over_coverages,
    auroc,
    brier,
    e_aurc,
    ece,
    gamma_from_auroc,
    nll,
    optimal_aurc,
    rc_curve,
    sac_coverage,
    spearman,
)
from uqbench.predlog import LogKind, make_log
from uqbench.synth import (
    flat_score_vector,
    investment_log,
    perfect_score_vector,
    random_score_vector,
)


def sv(scores, correct):
    return ScoreVector(np.asarray(scores, dtype=np.float64),
                       np.asarray(correct, dtype=bool))


class TestRcCurve:
    def test_enumerated_example(self):
        curve = rc_curve(sv([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0]))
        np.testing.assert_allclose(curve.coverages, [0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(curve.risks, [0.0, 0.5, 1 / 3, 0.5])
        assert curve.achievable.all()

    def test_flat_curve(self):
        curve = rc_curve(flat_score_vector(0.8, 1000))
        np.testing.assert_allclose(curve.risks, 0.2, atol=1e-12)
        assert curve.achievable.sum() == 1  # single tie block

    def test_perfect_ranking(self):
        curve = rc_curve(perfect_score_vector(0.4, 10))
        np.testing.assert_allclose(curve.risks[:4], 0.0)
        cov = curve.coverages[4:]
        np.testing.assert_allclose(curve.risks[4:], (cov - 0.4) / cov)

    def test_invariants(self):
        curve = rc_curve(random_score_vector(321, seed=0, tied=True))
        assert (np.diff(curve.coverages) > 0).all()
        assert curve.coverages[-1] == 1.0
        assert (np.diff(curve.thresholds) <= 0).all()


class TestAurc:
    def test_flat_values(self):
        assert abs(aurc(rc_curve(flat_score_vector(0.2, 10000))) - 0.8) < 1e-12
        a = aurc(rc_curve(sv([0.95] * 10000,
                             [1] * 9500 + [0] * 500)))
        assert abs(a - 0.05) < 1e-3

    def test_perfect_ranking_matches_paper(self):
        a = aurc(rc_curve(perfect_score_vector(0.8, 10000)))
        assert abs(a - 0.022) < 5e-3
        assert abs(a - (0.2 + 0.8 * math.log(0.8))) < 1e-3

    def test_optimal_aurc(self):
        assert optimal_aurc(1.0, 100) == 0.0
        assert abs(optimal_aurc(0.2, 10000) - 0.482) < 5e-3
        assert abs(optimal_aurc(0.8, 10000) - 0.022) < 5e-3

    def test_e_aurc_goldens(self):
        assert abs(e_aurc(flat_score_vector(0.2, 10000)) - 0.318) < 5e-3
        assert abs(e_aurc(flat_score_vector(0.8, 10000)) - 0.178) < 5e-3
        assert abs(e_aurc(perfect_score_vector(0.3, 500))) < 1e-12

    def test_e_aurc_nonnegative(self):
        for seed in range(20):
            assert e_aurc(random_score_vector(97, seed=seed, tied=seed % 2)) >= -1e-12

    def test_bounded_by_anti_optimal(self):
        n = 200
        vec = random_score_vector(n, seed=3)
        k = int(vec.correctness.sum())
        # worst ranking: every incorrect instance outscores every correct one
        anti_correct = np.array([False] * (n - k) + [True] * k)
        anti = aurc(rc_curve(ScoreVector(np.linspace(1.0, 0.0, n), anti_correct)))
        a = aurc(rc_curve(vec))
        assert optimal_aurc(k / n, n) - 1e-12 <= a <= anti + 1e-12


class TestAurcOverCoverages:
    def test_full_coverage_is_error_rate(self):
        vec = random_score_vector(150, seed=1)
        curve = rc_curve(vec)
        assert abs(aurc_over_coverages(curve, [1.0]) - (1 - vec.accuracy)) < 1e-12

    def test_perfect_low_coverage_zero(self):
        curve = rc_curve(perfect_score_vector(0.4, 1000))
        assert aurc_over_coverages(curve, [0.2, 0.4]) == 0.0

    def test_flat_any_coverages(self):
        curve = rc_curve(flat_score_vector(0.8, 1000))
        assert abs(aurc_over_coverages(curve, [0.3, 0.55, 0.9]) - 0.2) < 1e-12

    def test_validates_input(self):
        curve = rc_curve(flat_score_vector(0.8, 10))
        with pytest.raises(UQBenchError):
            aurc_over_coverages(curve, [])
        with pytest.raises(UQBenchError):
            aurc_over_coverages(curve, [1.5])


class TestSac:
    def test_investment_goldens(self):
        a = rc_curve(sv([0.95] * 10000, [1] * 9500 + [0] * 500))
        b = rc_curve(sv([0.6] * 4000 + [0.4] * 6000, [1] * 4000 + [0] * 6000))
        assert sac_coverage(b, 0.95) == 0.4
        assert sac_coverage(a, 0.96) == 0.0
        assert sac_coverage(a, 0.95) == 1.0
        assert sac_coverage(b, 0.96) == 0.4

    def test_monotone_in_target(self):
        curve = rc_curve(random_score_vector(250, seed=4, tied=True))
        values = [sac_coverage(curve, t) for t in np.linspace(0, 1, 21)]
        assert all(x >= y for x, y in zip(values, values[1:]))


class TestAuroc:
    def test_constant_scores_half(self):
        assert auroc(flat_score_vector(0.95, 200)) == 0.5

    def test_perfect_two_level(self):
        vec = sv([0.6] * 4 + [0.4] * 6, [1] * 4 + [0] * 6)
        assert auroc(vec) == 1.0

    def test_pair_count_example(self):
        assert auroc(sv([0.1, 0.2, 0.3, 0.4], [0, 1, 0, 1])) == 0.75

    def test_degenerate_undefined(self):
        assert isinstance(auroc(sv([0.1, 0.2], [1, 1])), Undefined)
        assert isinstance(auroc(sv([0.1, 0.2], [0, 0])), Undefined)

    def test_complement_identity_no_ties(self):
        vec = random_score_vector(301, seed=5)
        flipped = ScoreVector(-vec.scores, vec.correctness)
        assert abs(auroc(vec) + auroc(flipped) - 1.0) < 1e-12

    def test_gamma(self):
        assert gamma_from_auroc(0.5) == 0.0
        assert gamma_from_auroc(1.0) == 1.0
        assert gamma_from_auroc(0.75) == 0.5

    def test_gamma_matches_pair_ratio(self):
        vec = random_score_vector(80, seed=6)
        c, d = oracles.concordant_discordant(vec.scores, vec.correctness)
        assert abs(auroc(vec) - c / (c + d)) < 1e-12
        assert abs(gamma_from_auroc(auroc(vec)) - (c - d) / (c + d)) < 1e-12


class TestOrderInvariance:
    @pytest.mark.parametrize("transform", [np.exp, lambda x: 2 * x + 1])
    def test_rank_metrics_invariant(self, transform):
        vec = random_score_vector(173, seed=7, tied=True)
        mapped = ScoreVector(transform(vec.scores), vec.correctness)
        assert auroc(vec) == auroc(mapped)
        assert abs(aurc(rc_curve(vec)) - aurc(rc_curve(mapped))) < 1e-12
        assert abs(e_aurc(vec) - e_aurc(mapped)) < 1e-12
        for t in (0.5, 0.8, 0.95):
            assert sac_coverage(rc_curve(vec), t) == sac_coverage(rc_curve(mapped), t)


class TestEce:
    def test_investment_goldens(self):
        from uqbench.kappa import KappaSpec, score_log

        sva = score_log(investment_log("A"), KappaSpec())
        svb = score_log(investment_log("B"), KappaSpec())
        assert abs(ece(sva)) < 1e-12
        assert abs(ece(svb) - 0.4) < 1e-12

    def test_single_occupied_bin(self):
        vec = sv([0.8] * 10, [1] * 6 + [0] * 4)
        assert abs(ece(vec, 15) - 0.2) < 1e-12

    def test_one_bin_is_accuracy_gap(self):
        vec = random_score_vector(400, seed=8)
        bounded = ScoreVector(1 / (1 + np.exp(-vec.scores)), vec.correctness)
        expected = abs(bounded.correctness.mean() - bounded.scores.mean())
        assert abs(ece(bounded, 1) - expected) < 1e-12

    def test_zero_goes_to_first_bin(self):
        vec = sv([0.0, 1.0], [0, 1])
        assert abs(ece(vec, 15)) < 1e-12

    def test_out_of_range_refused(self):
        with pytest.raises(ScoreRangeError, match="outside"):
            ece(sv([-0.5, 0.5], [1, 0]))

    def test_in_unit_interval(self):
        vec = random_score_vector(300, seed=9)
        bounded = ScoreVector(1 / (1 + np.exp(-vec.scores)), vec.correctness)
        assert 0.0 <= ece(bounded) <= 1.0


class TestNllBrier:
    def test_one_hot_correct(self):
        eye = np.eye(3)
        log = make_log(LogKind.PROBS, 3, [0, 1, 2], eye)
        assert nll(log) == 0.0
        assert brier(log) == 0.0

    def test_zero_probability_inf(self):
        log = make_log(LogKind.PROBS, 2, [1], [[1.0, 0.0]])
        assert math.isinf(nll(log))

    def test_score_only_refused(self):
        log = make_log(LogKind.SCORE_ONLY, 2, [1], [[0.5]])
        with pytest.raises(UQBenchError):
            nll(log)
        with pytest.raises(UQBenchError):
            brier(log)

    def test_logits_and_probs_agree(self):
        rng = np.random.default_rng(10)
        z = rng.normal(size=(50, 4))
        labels = rng.integers(0, 4, 50)
        from uqbench.kappa import softmax

        log_z = make_log(LogKind.LOGITS, 4, labels, z)
        log_p = make_log(LogKind.PROBS, 4, labels, softmax(z))
        assert abs(nll(log_z) - nll(log_p)) < 1e-10
        assert abs(brier(log_z) - brier(log_p)) < 1e-10


class TestSpearman:
    def test_basic_values(self):
        assert spearman([1, 2, 3], [10, 20, 30]) == 1.0
        assert spearman([1, 2, 3], [3, 2, 1]) == -1.0
        assert abs(spearman([1, 2, 3], [1, 3, 2]) - 0.5) < 1e-12

    def test_zero_variance_undefined(self):
        assert isinstance(spearman([1, 1, 1], [1, 2, 3]), Undefined)

    def test_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(11)
        xs = np.round(rng.normal(size=60), 1)
        ys = np.round(rng.normal(size=60), 1)
        expected = scipy_stats.spearmanr(xs, ys).statistic
        assert abs(spearman(xs, ys) - expected) < 1e-12


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(-5, 5), st.booleans()), min_size=2, max_size=60
    ).filter(lambda rows: len({c for _, c in rows}) == 2)
)
def test_auroc_matches_pair_oracle_property(rows):
    scores = np.array([s for s, _ in rows], dtype=np.float64)
    correct = np.array([c for _, c in rows])
    vec = ScoreVector(scores, correct)
    assert auroc(vec) == oracles.auroc_pair_count(scores, correct)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(-4, 4), st.booleans()), min_size=1, max_size=50
    )
)
def test_aurc_matches_enumeration_property(rows):
    scores = np.array([s for s, _ in rows], dtype=np.float64)
    correct = np.array([c for _, c in rows])
    vec = ScoreVector(scores, correct)
    assert abs(aurc(rc_curve(vec)) - oracles.aurc_enumeration(scores, correct)) < 1e-12
