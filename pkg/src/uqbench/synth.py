"""Synthetic log and pool constructors used by tests and the golden suites.

Everything here is deterministic given its seed, so fixture files never
need to ship with the repository.
"""

from __future__ import annotations

import math

import numpy as np

from .coodgen import ClassPool, PoolClass
from .kappa import KappaSpec, ScoreVector
from .predlog import LogKind, PredictionLog, make_log


def investment_log(model: str, n: int = 10000) -> PredictionLog:
    """Three-class stock-direction toy models.

    Model A: 95% accurate, confidence 0.95 on every prediction.
    Model B: 40% accurate, confidence 0.6 when correct and 0.4 when not.
    Rows are full probability vectors with the non-predicted mass split
    uniformly over the remaining two classes; incorrect rows place the true
    class off the argmax.
    """
    if model == "A":
        acc, vec_correct, vec_wrong = 0.95, [0.95, 0.025, 0.025], [0.95, 0.025, 0.025]
    elif model == "B":
        acc, vec_correct, vec_wrong = 0.40, [0.6, 0.2, 0.2], [0.4, 0.3, 0.3]
    else:
        raise ValueError("model must be 'A' or 'B'")
    n_correct = round(n * acc)
    payload = np.empty((n, 3), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    payload[:n_correct] = vec_correct
    labels[:n_correct] = 0  # argmax is class 0 -> correct
    payload[n_correct:] = vec_wrong
    labels[n_correct:] = 1  # true class off the argmax -> incorrect
    return make_log(LogKind.PROBS, 3, labels, payload)


def flat_score_vector(accuracy: float, n: int, score: float = 0.5) -> ScoreVector:
    """Constant-score model: no ranking ability at all."""
    n_correct = round(n * accuracy)
    correct = np.zeros(n, dtype=bool)
    correct[:n_correct] = True
    return ScoreVector(np.full(n, score, dtype=np.float64), correct)


def perfect_score_vector(accuracy: float, n: int) -> ScoreVector:
    """Perfect ranking: every correct instance outscores every incorrect one."""
    n_correct = round(n * accuracy)
    correct = np.zeros(n, dtype=bool)
    correct[:n_correct] = True
    scores = np.linspace(1.0, 0.0, n)
    return ScoreVector(scores, correct)


def calibrated_binary_logits(n: int = 10000, correct_fraction: float = 0.75,
                             scale: float = 1.0, seed: int = 0) -> PredictionLog:
    """Two-class logits whose calibration-NLL minimizer is exactly T = scale.

    Every row carries the same logit gap a with sigmoid(a) equal to the
    empirical accuracy, which makes T = 1 a stationary point of the NLL of
    the unscaled log; multiplying the logits by ``scale`` moves the
    minimizer to exactly ``scale``. Rows are shuffled by seed.
    """
    n_correct = round(n * correct_fraction)
    f = n_correct / n
    gap = math.log(f) - math.log(1.0 - f)
    labels = np.zeros(n, dtype=np.int64)
    labels[n_correct:] = 1
    rng = np.random.default_rng(seed)
    labels = labels[rng.permutation(n)]
    payload = np.zeros((n, 2), dtype=np.float64)
    payload[:, 0] = gap * scale
    return make_log(LogKind.LOGITS, 2, labels, payload)


def random_logits_log(n: int, k: int, seed: int) -> PredictionLog:
    rng = np.random.default_rng(seed)
    logits = rng.normal(size=(n, k)) * 3.0
    labels = rng.integers(0, k, size=n)
    return make_log(LogKind.LOGITS, k, labels, logits)


def random_score_vector(n: int, seed: int, tied: bool = False,
                        accuracy: float = 0.6) -> ScoreVector:
    """Random scores and correctness; quantized to force ties when asked."""
    rng = np.random.default_rng(seed)
    scores = rng.normal(size=n)
    if tied:
        scores = np.round(scores * 2.0) / 2.0
    correct = rng.random(n) < accuracy
    if not correct.any():
        correct[rng.integers(0, n)] = True
    if correct.all():
        correct[rng.integers(0, n)] = False
    return ScoreVector(scores, correct)


def graded_pool(kappa_spec: KappaSpec, n_classes: int = 600, window: int = 100,
                est_size: int = 30, test_size: int = 50, seed: int = 0,
                id_mean: float = 2.0, low_mean: float = -4.0):
    """Difficulty-graded OOD pool plus matching ID scores.

    Class j's score distribution slides from ``low_mean`` (trivially
    detectable) up to ``id_mean``; the top ``window`` classes sit exactly on
    the ID distribution so the last severity level detects at chance.
    Returns (pool, id_scores).
    """
    rng = np.random.default_rng(seed)
    knee = n_classes - window
    classes = []
    for j in range(n_classes):
        mean = min(id_mean, low_mean + (id_mean - low_mean) * j / knee)
        est = rng.normal(mean, 0.01, size=est_size)
        test = rng.normal(mean, 1.0, size=test_size)
        classes.append(PoolClass(f"c{j:05d}", est, test))
    pool = ClassPool(tuple(classes), kappa_spec, est_size, test_size, seed=seed)
    id_scores = rng.normal(id_mean, 1.0, size=3000)
    return pool, id_scores
