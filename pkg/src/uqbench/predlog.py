"""Prediction-log data model, CSV/UQL1 file formats, and split utilities.

A log stores one record per evaluated instance: the ground-truth label plus
either a logit vector, a probability vector, or a bare confidence score.
Files hold float32 values; everything is widened to float64 in memory, so a
save/load round trip of a UQL1 file is byte-identical.

Score-only logs carry no class vectors, so correctness cannot be derived
from an argmax; for those logs the label column is the 0/1 correctness
indicator (1 = the underlying prediction was correct).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import LogFormatError

SIMPLEX_TOL = 1e-5

_MAGIC = b"UQL1"
_VERSION = 1
_HEADER = struct.Struct("<4sIBHIQ")  # magic, version, kind, passes, k, n


class LogKind(Enum):
    LOGITS = "logits"
    PROBS = "probs"
    SCORE_ONLY = "score-only"


_KIND_CODE = {LogKind.LOGITS: 0, LogKind.PROBS: 1, LogKind.SCORE_ONLY: 2}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


@dataclass(frozen=True)
class PredictionLog:
    """Immutable in-memory prediction log.

    payload has shape (n, passes, width) where width == num_classes for
    vector kinds and 1 for score-only logs.
    """

    kind: LogKind
    num_classes: int
    labels: np.ndarray
    payload: np.ndarray
    passes: int = 1

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def width(self) -> int:
        return int(self.payload.shape[2])

    def single_pass(self) -> np.ndarray:
        """The (n, width) payload of a single-pass log."""
        if self.passes != 1:
            raise LogFormatError("log has multiple passes; aggregate first")
        return self.payload[:, 0, :]


@dataclass(frozen=True)
class SplitAssignment:
    calibration: np.ndarray
    test: np.ndarray
    seed: int


def make_log(kind, num_classes, labels, payload, passes=1) -> PredictionLog:
    """Assemble and validate a log from arrays.

    ``payload`` may be (n, width) for single-pass logs or (n, passes, width).
    """
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    payload = np.asarray(payload, dtype=np.float64)
    if payload.ndim == 2:
        payload = payload[:, None, :]
    payload = np.ascontiguousarray(payload)
    log = PredictionLog(kind, int(num_classes), labels, payload, int(passes))
    validate_log(log)
    return log


def validate_log(log: PredictionLog) -> None:
    """Check every documented invariant; raise LogFormatError with a row index."""
    if log.n < 1:
        raise LogFormatError("log must contain at least one record")
    if log.passes < 1:
        raise LogFormatError("passes must be >= 1")
    if log.payload.shape != (log.n, log.passes, log.width):
        raise LogFormatError("payload shape does not match header fields")
    if log.kind is LogKind.SCORE_ONLY:
        if log.width != 1:
            raise LogFormatError("score-only payload must have width 1")
        if log.passes != 1:
            raise LogFormatError("score-only logs cannot be multi-pass")
    else:
        if log.width != log.num_classes:
            raise LogFormatError(
                f"row length {log.width} != num_classes {log.num_classes}"
            )

    finite = np.isfinite(log.payload).all(axis=(1, 2))
    if not finite.all():
        raise LogFormatError("non-finite value", row=int(np.argmin(finite)))

    if log.labels.min(initial=0) < 0:
        raise LogFormatError(
            "negative label", row=int(np.argmax(log.labels < 0))
        )
    if log.kind is LogKind.SCORE_ONLY:
        bad = log.labels > 1
        if bad.any():
            raise LogFormatError(
                "score-only labels must be 0/1 correctness", row=int(np.argmax(bad))
            )
    else:
        bad = log.labels >= log.num_classes
        if bad.any():
            raise LogFormatError("label out of range", row=int(np.argmax(bad)))

    if log.kind is LogKind.PROBS:
        p = log.payload
        in_range = ((p >= 0.0) & (p <= 1.0)).all(axis=(1, 2))
        if not in_range.all():
            raise LogFormatError(
                "probability outside [0,1]", row=int(np.argmin(in_range))
            )
        sums_ok = (np.abs(p.sum(axis=2) - 1.0) <= SIMPLEX_TOL).all(axis=1)
        if not sums_ok.all():
            raise LogFormatError(
                "probability row violates simplex tolerance",
                row=int(np.argmin(sums_ok)),
            )


# ---------------------------------------------------------------------------
# UQL1 binary format


def save_uql1(log: PredictionLog, path) -> None:
    header = _HEADER.pack(
        _MAGIC, _VERSION, _KIND_CODE[log.kind], log.passes, log.num_classes, log.n
    )
    row_dtype = np.dtype([("label", "<u4"), ("vals", "<f4", (log.width,))])
    rows = np.empty(log.n * log.passes, dtype=row_dtype)
    rows["label"] = np.repeat(log.labels.astype(np.uint32), log.passes)
    rows["vals"] = log.payload.astype(np.float32).reshape(-1, log.width)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(rows.tobytes())


def load_uql1(path) -> PredictionLog:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < _HEADER.size:
        raise LogFormatError("truncated UQL1 header")
    magic, version, kind_code, passes, k, n = _HEADER.unpack_from(buf)
    if magic != _MAGIC:
        raise LogFormatError("bad magic bytes")
    if version != _VERSION:
        raise LogFormatError(f"unsupported UQL1 version {version}")
    if kind_code not in _CODE_KIND:
        raise LogFormatError(f"unknown kind code {kind_code}")
    kind = _CODE_KIND[kind_code]
    width = 1 if kind is LogKind.SCORE_ONLY else k
    row_dtype = np.dtype([("label", "<u4"), ("vals", "<f4", (width,))])
    expected = _HEADER.size + n * passes * row_dtype.itemsize
    if len(buf) != expected:
        raise LogFormatError(
            f"file size {len(buf)} != expected {expected} for n={n}, passes={passes}"
        )
    rows = np.frombuffer(buf, dtype=row_dtype, count=n * passes, offset=_HEADER.size)
    labels_all = rows["label"].astype(np.int64).reshape(n, passes)
    if passes > 1 and (labels_all != labels_all[:, :1]).any():
        bad = int(np.argmax((labels_all != labels_all[:, :1]).any(axis=1)))
        raise LogFormatError("label differs across passes", row=bad)
    payload = rows["vals"].astype(np.float64).reshape(n, passes, width)
    return make_log(kind, k, labels_all[:, 0], payload, passes)


# ---------------------------------------------------------------------------
# CSV format


def _csv_kind(header):
    cols = [h.strip() for h in header]
    if cols[:1] != ["label"]:
        raise LogFormatError("CSV header must start with 'label'")
    rest = cols[1:]
    if rest == ["score"]:
        return LogKind.SCORE_ONLY, 1
    for kind, prefix in ((LogKind.PROBS, "p_"), (LogKind.LOGITS, "logit_")):
        if rest and all(c == f"{prefix}{i}" for i, c in enumerate(rest)):
            return kind, len(rest)
    raise LogFormatError(f"unrecognized CSV header: {','.join(cols)}")


def load_csv(path) -> PredictionLog:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LogFormatError("empty CSV file") from None
        kind, width = _csv_kind(header)
        labels, values = [], []
        for i, row in enumerate(reader):
            if not row:
                continue
            if len(row) != width + 1:
                raise LogFormatError(
                    f"row length {len(row) - 1} != {width}", row=i
                )
            try:
                labels.append(int(row[0]))
                values.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise LogFormatError(f"unparseable value: {exc}", row=i) from None
    if not labels:
        raise LogFormatError("CSV contains no data rows")
    payload = np.asarray(values, dtype=np.float32).astype(np.float64)
    k = 2 if kind is LogKind.SCORE_ONLY else width
    return make_log(kind, k, np.asarray(labels), payload)


def save_csv(log: PredictionLog, path) -> None:
    if log.passes != 1:
        raise LogFormatError("CSV cannot store multi-pass logs")
    prefix = {LogKind.PROBS: "p_", LogKind.LOGITS: "logit_"}.get(log.kind)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if log.kind is LogKind.SCORE_ONLY:
            writer.writerow(["label", "score"])
        else:
            writer.writerow(["label"] + [f"{prefix}{i}" for i in range(log.width)])
        vals = log.payload[:, 0, :].astype(np.float32)
        for label, row in zip(log.labels, vals):
            writer.writerow([int(label)] + [repr(float(v)) for v in row])


def load_log(path, format=None) -> PredictionLog:
    """Load a log; format inferred from the extension when not given."""
    path = Path(path)
    if not path.exists():
        raise LogFormatError(f"no such file: {path}")
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "uql1"
    if format == "csv":
        return load_csv(path)
    if format == "uql1":
        return load_uql1(path)
    raise LogFormatError(f"unknown format {format!r}")


def save_log(log, path, format=None) -> None:
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "uql1"
    if format == "csv":
        save_csv(log, path)
    elif format == "uql1":
        save_uql1(log, path)
    else:
        raise LogFormatError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# Splitting


def stratified_split(log: PredictionLog, calibration_size, seed) -> SplitAssignment:
    """Class-proportional calibration/test split, deterministic in seed.

    Per-class counts follow largest-remainder rounding with remainder ties
    broken by ascending class index.
    """
    n = log.n
    if calibration_size >= n:
        raise LogFormatError(
            f"calibration_size {calibration_size} must be < n = {n}"
        )
    if calibration_size < 0:
        raise LogFormatError("calibration_size must be >= 0")
    labels = log.labels
    classes, counts = np.unique(labels, return_counts=True)
    quota = calibration_size * counts / n
    base = np.floor(quota).astype(np.int64)
    frac = quota - base
    short = calibration_size - int(base.sum())
    if short:
        # largest fractional remainder first, ties by ascending class index
        order = np.lexsort((np.arange(len(classes)), -frac))
        base[order[:short]] += 1
    rng = np.random.default_rng(seed)
    picks = []
    for cls, alloc in zip(classes, base):
        idx = np.flatnonzero(labels == cls)
        if alloc:
            picks.append(rng.choice(idx, size=int(alloc), replace=False))
    calib = np.sort(np.concatenate(picks)) if picks else np.empty(0, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    mask[calib] = False
    return SplitAssignment(calib.astype(np.int64), np.flatnonzero(mask), int(seed))


def subsample_class(samples, target, seed):
    """Uniform subset of ``target`` samples, original order kept."""
    n = len(samples)
    if n < target:
        raise LogFormatError(f"cannot subsample {target} from {n} samples")
    if n == target:
        return list(samples)
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(n, size=int(target), replace=False))
    if isinstance(samples, np.ndarray):
        return samples[keep]
    return [samples[i] for i in keep]
