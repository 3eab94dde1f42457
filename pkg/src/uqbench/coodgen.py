"""Model-specific class-OOD benchmark construction and evaluation.

Candidate OOD classes are filtered, subsampled to a fixed size, and split
per class into estimation and test samples. Each class gets a severity
score (mean confidence the model assigns to its estimation samples: higher
means harder to distinguish from in-distribution data). Classes are sorted
by severity, a sliding window over the sorted array forms candidate groups,
and 11 groups at the {0,10,...,100} severity percentiles become the
benchmark's severity levels. Detection at each level is the AUROC of the
confidence score with in-distribution samples as the positive class,
evaluated on test samples only.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoolError
from .kappa import KappaSpec, ScoreVector, score_log
from .metrics import Undefined, auroc
from .predlog import subsample_class

DEFAULT_MIN_SAMPLES = 200
DEFAULT_TARGET_SAMPLES = 200
DEFAULT_EST_SIZE = 150
DEFAULT_TEST_SIZE = 50
DEFAULT_LEVELS = 11


@dataclass(frozen=True)
class PoolClass:
    class_id: str
    est_scores: np.ndarray
    test_scores: np.ndarray


@dataclass(frozen=True)
class ClassPool:
    classes: tuple
    kappa_spec: KappaSpec
    est_size: int
    test_size: int
    exclusion_applied: bool = False
    seed: int | None = None

    def __post_init__(self):
        ids = [c.class_id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise PoolError("duplicate class ids in pool")
        for c in self.classes:
            if len(c.est_scores) != self.est_size or len(c.test_scores) != self.test_size:
                raise PoolError(
                    f"class {c.class_id}: est/test sizes do not match the "
                    f"configured {self.est_size}/{self.test_size} split"
                )
            if not (
                np.isfinite(c.est_scores).all() and np.isfinite(c.test_scores).all()
            ):
                raise PoolError(f"class {c.class_id}: non-finite score")

    @property
    def size(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class SeverityLevel:
    index: int
    class_ids: tuple
    group_severity: float


@dataclass(frozen=True)
class SeverityLevels:
    levels: tuple
    window: int
    class_severities: dict

    def to_manifest(self, kappa_spec: KappaSpec, seed=None) -> str:
        doc = {
            "kappa_spec": kappa_spec.to_dict(),
            "window": self.window,
            "seed": seed,
            "levels": [
                {
                    "index": lv.index,
                    "group_severity": lv.group_severity,
                    "class_ids": list(lv.class_ids),
                }
                for lv in self.levels
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class SeverityProfile:
    detection_auroc: tuple
    kappa_spec: KappaSpec
    id_identity: str

    def to_csv(self) -> str:
        lines = ["level,auroc"]
        lines += [f"{i},{repr(v)}" for i, v in enumerate(self.detection_auroc)]
        return "\n".join(lines) + "\n"


def filter_pool(raw_classes, exclusion, min_samples=DEFAULT_MIN_SAMPLES,
                target=DEFAULT_TARGET_SAMPLES, seed=0):
    """Drop excluded and undersized classes; subsample survivors to target.

    ``raw_classes`` maps class_id -> sequence of per-sample values. The
    exclusion list comes from external taxonomy processing. Deterministic:
    classes are visited in sorted id order with one seeded generator.
    """
    excluded = set(exclusion)
    rng = np.random.default_rng(seed)
    out = {}
    for class_id in sorted(raw_classes):
        samples = raw_classes[class_id]
        if class_id in excluded or len(samples) < min_samples:
            continue
        sub_seed = int(rng.integers(0, 2**63 - 1))
        out[class_id] = subsample_class(samples, target, sub_seed)
    if not out:
        raise PoolError("no classes survive filtering")
    return out


def class_severity(est_scores) -> float:
    """Mean confidence over a class's estimation samples."""
    scores = np.asarray(est_scores, dtype=np.float64)
    if scores.size == 0:
        raise PoolError("empty estimation set")
    return float(scores.mean())


def split_class_scores(scores, est_size=DEFAULT_EST_SIZE,
                       test_size=DEFAULT_TEST_SIZE, seed=0):
    """Deterministic est/test partition of one class's sample scores."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size != est_size + test_size:
        raise PoolError(
            f"need exactly {est_size + test_size} samples, got {scores.size}"
        )
    perm = np.random.default_rng(seed).permutation(scores.size)
    return scores[perm[:est_size]], scores[perm[est_size:]]


def build_pool_from_scores(per_class_scores, kappa_spec, est_size=DEFAULT_EST_SIZE,
                           test_size=DEFAULT_TEST_SIZE, seed=0) -> ClassPool:
    """Pool from class_id -> flat score arrays; splits assigned by seed."""
    rng = np.random.default_rng(seed)
    classes = []
    for class_id in sorted(per_class_scores):
        sub_seed = int(rng.integers(0, 2**63 - 1))
        est, test = split_class_scores(
            per_class_scores[class_id], est_size, test_size, sub_seed
        )
        classes.append(PoolClass(str(class_id), est, test))
    return ClassPool(tuple(classes), kappa_spec, est_size, test_size, seed=seed)


def build_pool_from_logs(per_class_logs, kappa_spec, est_size=DEFAULT_EST_SIZE,
                         test_size=DEFAULT_TEST_SIZE, seed=0) -> ClassPool:
    """Pool from class_id -> PredictionLog, scored through the kappa spec.

    OOD samples have no valid in-distribution label, so only the scores of
    the score vector are used.
    """
    per_class_scores = {
        cid: score_log(log, kappa_spec).scores for cid, log in per_class_logs.items()
    }
    return build_pool_from_scores(per_class_scores, kappa_spec, est_size, test_size, seed)


def load_pool_csv(path, kappa_spec) -> ClassPool:
    """Pool table CSV: header class_id,split,score with split in {est,test}.

    The CSV carries no kappa identity; the caller declares the spec the
    scores were produced with.
    """
    est, test = {}, {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["class_id", "split", "score"]:
            raise PoolError("pool CSV header must be class_id,split,score")
        for i, row in enumerate(reader):
            if not row:
                continue
            if len(row) != 3 or row[1] not in ("est", "test"):
                raise PoolError(f"bad pool row {i}: {row}")
            bucket = est if row[1] == "est" else test
            bucket.setdefault(row[0], []).append(float(row[2]))
    ids = sorted(set(est) | set(test))
    if not ids:
        raise PoolError("pool CSV contains no rows")
    est_sizes = {len(est.get(c, ())) for c in ids}
    test_sizes = {len(test.get(c, ())) for c in ids}
    if len(est_sizes) != 1 or len(test_sizes) != 1:
        raise PoolError("per-class est/test counts are not uniform")
    classes = tuple(
        PoolClass(c, np.asarray(est[c], dtype=np.float64),
                  np.asarray(test.get(c, []), dtype=np.float64))
        for c in ids
    )
    return ClassPool(classes, kappa_spec, est_sizes.pop(), test_sizes.pop())


def save_pool_csv(pool: ClassPool, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_id", "split", "score"])
        for c in pool.classes:
            for v in c.est_scores:
                writer.writerow([c.class_id, "est", repr(float(v))])
            for v in c.test_scores:
                writer.writerow([c.class_id, "test", repr(float(v))])


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_severity_levels(pool: ClassPool, window: int,
                          levels: int = DEFAULT_LEVELS) -> SeverityLevels:
    """Sliding-window severity groups at evenly spaced percentiles.

    Classes sort ascending by severity (ties by class id). Means of
    contiguous windows over a sorted array are non-decreasing, so window
    order already equals severity order; level i takes the window at index
    round((i/(levels-1)) * (G-1)), rounded half away from zero.
    """
    if levels < 2:
        raise PoolError("need at least two severity levels")
    n = pool.size
    if n < window:
        raise PoolError(f"pool size {n} < window {window}")
    sev = {c.class_id: class_severity(c.est_scores) for c in pool.classes}
    ordered = sorted(pool.classes, key=lambda c: (sev[c.class_id], c.class_id))
    sev_sorted = np.array([sev[c.class_id] for c in ordered])
    cum = np.concatenate(([0.0], np.cumsum(sev_sorted)))
    groups = n - window + 1
    out = []
    for i in range(levels):
        g = _round_half_away(i / (levels - 1) * (groups - 1))
        ids = tuple(c.class_id for c in ordered[g:g + window])
        group_sev = float((cum[g + window] - cum[g]) / window)
        out.append(SeverityLevel(i, ids, group_sev))
    return SeverityLevels(tuple(out), window, sev)


def detection_auroc(id_scores, ood_scores) -> float:
    """Separability of ID from OOD confidence scores, ID as the positive class."""
    id_scores = np.asarray(id_scores, dtype=np.float64)
    ood_scores = np.asarray(ood_scores, dtype=np.float64)
    if id_scores.size == 0 or ood_scores.size == 0:
        raise PoolError("both ID and OOD score sets must be non-empty")
    scores = np.concatenate([id_scores, ood_scores])
    is_id = np.concatenate(
        [np.ones(id_scores.size, dtype=bool), np.zeros(ood_scores.size, dtype=bool)]
    )
    value = auroc(ScoreVector(scores, is_id))
    assert not isinstance(value, Undefined)  # both sides checked non-empty
    return value


def severity_profile(id_scores, pool: ClassPool, kappa_spec: KappaSpec,
                     window: int, levels: int = DEFAULT_LEVELS,
                     id_identity: str = "") -> tuple:
    """Per-level detection AUROC; returns (SeverityLevels, SeverityProfile).

    The benchmark is tailored to (model, kappa): the pool must have been
    scored with the same spec as the ID log. Detection uses test samples
    only; estimation samples never leak into evaluation.
    """
    if kappa_spec != pool.kappa_spec:
        raise PoolError(
            "kappa spec mismatch between pool and ID log: "
            f"{pool.kappa_spec} vs {kappa_spec}"
        )
    manifest = build_severity_levels(pool, window, levels)
    test_by_id = {c.class_id: c.test_scores for c in pool.classes}
    aurocs = []
    for level in manifest.levels:
        ood = np.concatenate([test_by_id[c] for c in level.class_ids])
        aurocs.append(detection_auroc(id_scores, ood))
    profile = SeverityProfile(tuple(aurocs), kappa_spec, id_identity)
    return manifest, profile
