"""Scalar metrics and curves for selective prediction and calibration.

Ranking metrics (RC curve, AURC, E-AURC, SAC, AUROC) depend only on the
order the scores induce. Ties are handled as exchangeable blocks: a
coverage cut inside a block of equal scores takes the block's pooled error
rate pro-rata, the expected risk under a uniformly random tie order; AUROC
counts tied (correct, incorrect) pairs as 1/2 via midranks.

Degenerate inputs (all-correct logs, zero-variance correlations) yield a
typed ``Undefined`` value rather than NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import grid_expected_errors, midranks
from .errors import IncompatibleKappaError, ScoreRangeError, UQBenchError
from .kappa import ScoreVector, nll_of_logits, softmax
from .predlog import LogKind, PredictionLog

DEFAULT_ECE_BINS = 15

# guards float round-off when a selective accuracy sits exactly on a target
_SAC_EPS = 1e-9


@dataclass(frozen=True)
class Undefined:
    """Marker for metrics that are undefined on the given input."""

    reason: str


def metric_value_to_json(value):
    """JSON-safe encoding; undefined/infinite become explicit status objects."""
    if isinstance(value, Undefined):
        return {"status": "undefined", "reason": value.reason}
    v = float(value)
    if math.isinf(v):
        return {"status": "infinite", "reason": "zero probability on a true class"}
    return v


@dataclass(frozen=True)
class RCCurve:
    """Risk-coverage curve on the per-instance coverage grid i/n.

    ``achievable`` marks grid points that correspond to an actual threshold
    on the scores (tie-block ends); interior points are tie-interpolated.
    """

    thresholds: np.ndarray
    coverages: np.ndarray
    risks: np.ndarray
    achievable: np.ndarray
    n: int

    def threshold_points(self):
        """(threshold, coverage, risk) triples at achievable coverages."""
        m = self.achievable
        return list(
            zip(self.thresholds[m], self.coverages[m], self.risks[m])
        )

    def expected_errors_at(self, instance_count):
        """Expected selected-error count at a (possibly fractional) cut."""
        grid = np.arange(self.n + 1, dtype=np.float64)
        e = np.concatenate(([0.0], self.risks * np.arange(1, self.n + 1)))
        return np.interp(instance_count, grid, e)


@dataclass
class MetricReport:
    """Named scalar metrics for one (log, kappa, configuration) evaluation."""

    metrics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "metrics": {k: metric_value_to_json(v) for k, v in self.metrics.items()},
            "config": self.config,
            "provenance": self.provenance,
        }


def rc_curve(sv: ScoreVector) -> RCCurve:
    """Risk-coverage curve of a score vector, scores swept descending."""
    if sv.n < 1:
        raise UQBenchError("empty score vector")
    order = np.argsort(-sv.scores, kind="stable")
    s = sv.scores[order]
    c = sv.correctness[order].astype(np.float64)
    expected = grid_expected_errors(c, s)
    n = sv.n
    i = np.arange(1, n + 1, dtype=np.float64)
    achievable = np.empty(n, dtype=bool)
    achievable[-1] = True
    np.not_equal(s[1:], s[:-1], out=achievable[:-1])
    return RCCurve(s, i / n, expected / i, achievable, n)


def aurc(curve: RCCurve) -> float:
    """Mean selective risk over the per-instance coverage grid."""
    return float(curve.risks.mean())


def _optimal_aurc_from_count(correct_count: int, n: int) -> float:
    i = np.arange(1, n + 1, dtype=np.float64)
    risks = np.maximum(i - correct_count, 0.0) / i
    return float(risks.mean())


def optimal_aurc(accuracy: float, n: int) -> float:
    """AURC of a same-accuracy model whose scores rank perfectly."""
    if not 0.0 <= accuracy <= 1.0:
        raise UQBenchError("accuracy must be in [0,1]")
    return _optimal_aurc_from_count(int(round(accuracy * n)), n)


def e_aurc(sv: ScoreVector) -> float:
    """AURC minus the perfect-ranking AURC on the same correctness multiset."""
    actual = aurc(rc_curve(sv))
    best = _optimal_aurc_from_count(int(sv.correctness.sum()), sv.n)
    return actual - best


def aurc_over_coverages(curve: RCCurve, coverages) -> float:
    """Mean selective risk at the listed coverages (off-grid cuts interpolated)."""
    cov = np.asarray(list(coverages), dtype=np.float64)
    if cov.size == 0:
        raise UQBenchError("coverage set must be non-empty")
    if ((cov <= 0.0) | (cov > 1.0)).any():
        raise UQBenchError("coverages must lie in (0,1]")
    m = cov * curve.n
    return float((curve.expected_errors_at(m) / m).mean())


def sac_coverage(curve: RCCurve, accuracy_target: float) -> float:
    """Largest achievable coverage with selective accuracy >= target; else 0."""
    if not 0.0 <= accuracy_target <= 1.0:
        raise UQBenchError("accuracy target must be in [0,1]")
    mask = curve.achievable
    ok = (1.0 - curve.risks[mask]) >= accuracy_target - _SAC_EPS
    if not ok.any():
        return 0.0
    return float(curve.coverages[mask][ok].max())


def auroc(sv: ScoreVector):
    """P(correct instance outranks incorrect one), ties counted 1/2.

    Mann-Whitney statistic over midranks; Undefined when one side is empty.
    """
    correct = sv.correctness.astype(bool)
    n_pos = int(correct.sum())
    n_neg = sv.n - n_pos
    if n_pos == 0:
        return Undefined("all predictions incorrect")
    if n_neg == 0:
        return Undefined("all predictions correct")
    ranks = midranks(sv.scores)
    u = ranks[correct].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def gamma_from_auroc(value: float) -> float:
    """Goodman-Kruskal gamma, the linear transform 2*AUROC - 1."""
    if not 0.0 <= value <= 1.0:
        raise UQBenchError("AUROC must be in [0,1]")
    return 2.0 * value - 1.0


def ece(sv: ScoreVector, bins: int = DEFAULT_ECE_BINS) -> float:
    """Expected calibration error over equal-width right-closed bins.

    Bin j covers ((j-1)/m, j/m]; a score of exactly 0 goes to bin 1. Scores
    outside [0,1] are refused since they admit no probabilistic reading.
    Membership is decided against the float64 edges j/m themselves, so a
    score that rounds onto an edge lands in the bin the edge closes.
    """
    if bins < 1:
        raise UQBenchError("bin count must be >= 1")
    s = sv.scores
    if ((s < 0.0) | (s > 1.0)).any():
        raise ScoreRangeError("score outside [0,1]")
    edges = np.arange(1, bins + 1) / bins
    idx = np.searchsorted(edges, s, side="left")
    counts = np.bincount(idx, minlength=bins).astype(np.float64)
    conf = np.bincount(idx, weights=s, minlength=bins)
    acc = np.bincount(idx, weights=sv.correctness.astype(np.float64), minlength=bins)
    occupied = counts > 0
    gaps = np.abs(
        acc[occupied] / counts[occupied] - conf[occupied] / counts[occupied]
    )
    # sequential reduction: bin order is part of the protocol, and the array
    # is at most `bins` long anyway
    return float(sum((counts[occupied] / sv.n) * gaps))


def _prob_matrix(log: PredictionLog, temperature):
    if log.kind is LogKind.SCORE_ONLY:
        raise IncompatibleKappaError("metric needs probability semantics")
    if log.passes != 1:
        raise IncompatibleKappaError("aggregate multi-pass logs first")
    if log.kind is LogKind.LOGITS:
        return softmax(log.single_pass(), temperature)
    if temperature != 1.0:
        raise IncompatibleKappaError("temperature scaling needs logits")
    return log.single_pass()


def nll(log: PredictionLog, temperature: float = 1.0) -> float:
    """Mean -ln p(true class); +inf when a true class has zero probability."""
    if log.kind is LogKind.LOGITS:
        if log.passes != 1:
            raise IncompatibleKappaError("aggregate multi-pass logs first")
        return nll_of_logits(log.single_pass(), log.labels, temperature)
    p = _prob_matrix(log, temperature)
    p_true = p[np.arange(log.n), log.labels]
    with np.errstate(divide="ignore"):
        values = -np.log(p_true)
    return float(values.mean())


def brier(log: PredictionLog, temperature: float = 1.0) -> float:
    """Mean squared distance between the probability row and one-hot truth."""
    p = _prob_matrix(log, temperature)
    p_true = p[np.arange(log.n), log.labels]
    sq = (p * p).sum(axis=1) - 2.0 * p_true + 1.0
    return float(sq.mean())


def accuracy(log: PredictionLog, temperature: float = 1.0) -> float:
    p = _prob_matrix(log, temperature)
    return float((p.argmax(axis=1) == log.labels).mean())


def spearman(xs, ys):
    """Pearson correlation of midranks; Undefined on zero-variance input."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise UQBenchError("inputs must be equal-length vectors")
    if x.size < 2:
        raise UQBenchError("need at least two observations")
    rx = midranks(x)
    ry = midranks(y)
    if rx.std() == 0.0 or ry.std() == 0.0:
        return Undefined("zero variance")
    return float(np.corrcoef(rx, ry)[0, 1])
