"""Confidence-rate functions and temperature scaling.

A kappa spec turns a prediction log into a score vector: one scalar
confidence per instance plus the 0/1 correctness of the prediction it
accompanies. Temperature applies to logits only and never changes the
argmax, so accuracy is invariant under scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleKappaError, LogFormatError
from .predlog import LogKind, PredictionLog, SplitAssignment, make_log

BASES = ("softmax-response", "negative-entropy", "raw-score")

# temperature search domain and convergence width, in ln T
_LN_T_LO = math.log(0.01)
_LN_T_HI = math.log(100.0)
_LN_T_TOL = 1e-6
_GRID_POINTS = 50


@dataclass(frozen=True)
class KappaSpec:
    base: str = "softmax-response"
    temperature: float = 1.0
    mc_aggregate: bool = False

    def __post_init__(self):
        if self.base not in BASES:
            raise IncompatibleKappaError(f"unknown kappa base {self.base!r}")
        if not self.temperature > 0:
            raise IncompatibleKappaError("temperature must be > 0")

    def to_dict(self):
        return {
            "base": self.base,
            "temperature": self.temperature,
            "mc_aggregate": self.mc_aggregate,
        }


@dataclass(frozen=True)
class ScoreVector:
    """Per-instance confidence scores and prediction correctness."""

    scores: np.ndarray
    correctness: np.ndarray

    def __post_init__(self):
        if self.scores.shape != self.correctness.shape:
            raise ValueError("scores and correctness must be aligned")
        if not np.isfinite(self.scores).all():
            raise ValueError("scores must be finite")

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    @property
    def accuracy(self) -> float:
        return float(self.correctness.mean())


@dataclass(frozen=True)
class TemperatureFit:
    temperature: float
    nll_before: float
    nll_after: float
    split: SplitAssignment

    def to_dict(self):
        return {
            "temperature": self.temperature,
            "calibration_nll_before": self.nll_before,
            "calibration_nll_after": self.nll_after,
            "split_seed": self.split.seed,
            "calibration_size": int(len(self.split.calibration)),
        }


def softmax(logits, temperature=1.0):
    """Row-wise softmax of logits / T, max-subtracted for stability."""
    if not temperature > 0:
        raise IncompatibleKappaError("temperature must be > 0")
    z = np.asarray(logits, dtype=np.float64) / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_response(probs):
    """Probability assigned to the predicted (argmax) class."""
    return np.asarray(probs, dtype=np.float64).max(axis=-1)


def negative_entropy(probs):
    """sum_i p_i ln p_i, with 0 ln 0 = 0. Zero at one-hot, -ln k at uniform."""
    p = np.asarray(probs, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return terms.sum(axis=-1)


def mc_aggregate(log: PredictionLog, temperature=1.0) -> PredictionLog:
    """Collapse a multi-pass log to the mean probability vector per instance."""
    if log.kind is LogKind.SCORE_ONLY:
        raise IncompatibleKappaError("cannot aggregate a score-only log")
    if log.passes < 2:
        raise IncompatibleKappaError("mc_aggregate requires passes >= 2")
    if log.kind is LogKind.LOGITS:
        probs = softmax(log.payload, temperature)
    else:
        if temperature != 1.0:
            raise IncompatibleKappaError("temperature scaling needs logits")
        probs = log.payload
    mean = probs.mean(axis=1)
    mean = mean / mean.sum(axis=-1, keepdims=True)  # kill f32 round-off drift
    return make_log(LogKind.PROBS, log.num_classes, log.labels, mean)


def _prob_matrix(log: PredictionLog, temperature):
    """(n, k) probabilities of a single-pass vector log."""
    if log.kind is LogKind.LOGITS:
        return softmax(log.single_pass(), temperature)
    if temperature != 1.0:
        raise IncompatibleKappaError(
            "temperature scaling needs logits; probs-kind logs are refused"
        )
    return log.single_pass()


def score_log(log: PredictionLog, spec: KappaSpec) -> ScoreVector:
    """Apply a kappa spec to a log, yielding aligned scores and correctness."""
    if spec.base == "raw-score":
        if log.kind is not LogKind.SCORE_ONLY:
            raise IncompatibleKappaError("raw-score kappa needs a score-only log")
        if spec.temperature != 1.0 or spec.mc_aggregate:
            raise IncompatibleKappaError(
                "score-only logs support neither temperature nor MC aggregation"
            )
        scores = log.single_pass()[:, 0].copy()
        return ScoreVector(scores, log.labels == 1)

    if log.kind is LogKind.SCORE_ONLY:
        raise IncompatibleKappaError(f"{spec.base} kappa needs class vectors")

    if log.passes > 1:
        if not spec.mc_aggregate:
            raise IncompatibleKappaError(
                "multi-pass log requires mc_aggregate=True"
            )
        agg = mc_aggregate(log, spec.temperature)
        probs = agg.single_pass()
    elif spec.mc_aggregate:
        raise IncompatibleKappaError("mc_aggregate requires a multi-pass log")
    else:
        probs = _prob_matrix(log, spec.temperature)

    preds = probs.argmax(axis=1)
    correctness = preds == log.labels
    if spec.base == "softmax-response":
        scores = softmax_response(probs)
    else:
        scores = negative_entropy(probs)
    return ScoreVector(scores, correctness)


def nll_of_logits(logits, labels, temperature=1.0):
    """Mean -ln p(true class); log-sum-exp minus true-class scaled logit."""
    z = np.asarray(logits, dtype=np.float64) / temperature
    m = z.max(axis=1)
    lse = m + np.log(np.exp(z - m[:, None]).sum(axis=1))
    return float((lse - z[np.arange(len(labels)), labels]).mean())


def fit_temperature(log: PredictionLog, split: SplitAssignment) -> TemperatureFit:
    """Minimize calibration-split NLL over T in [0.01, 100].

    Coarse 50-point grid over ln T followed by golden-section refinement of
    the bracketing interval; deterministic given (log, split).
    """
    if log.kind is not LogKind.LOGITS:
        raise IncompatibleKappaError("temperature fitting needs a logits log")
    if log.passes != 1:
        raise IncompatibleKappaError("aggregate multi-pass logs before fitting")
    if len(split.calibration) == 0:
        raise LogFormatError("empty calibration split")

    z = log.single_pass()[split.calibration]
    y = log.labels[split.calibration]

    def objective(ln_t):
        return nll_of_logits(z, y, math.exp(ln_t))

    grid = np.linspace(_LN_T_LO, _LN_T_HI, _GRID_POINTS)
    values = [objective(x) for x in grid]
    j = int(np.argmin(values))
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, _GRID_POINTS - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = objective(c), objective(d)
    while hi - lo > _LN_T_TOL:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = objective(d)

    temperature = math.exp((lo + hi) / 2.0)
    before = nll_of_logits(z, y, 1.0)
    after = nll_of_logits(z, y, temperature)
    if after > before:  # T = 1 is in the domain; never report a worse fit
        temperature, after = 1.0, before
    return TemperatureFit(float(temperature), before, after, split)
