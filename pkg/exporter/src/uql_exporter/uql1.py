"""Producer-side UQL1 writer.

Layout (little-endian): magic ``UQL1``, u32 version (1), u8 kind
(0 = logits, 1 = probabilities, 2 = score-only), u16 forward passes T,
u32 class count k, u64 instance count n, then n*T rows of u32 label
followed by k float32 values, pass-major within each instance.

Writes go to a temp file in the destination directory and are renamed
into place, so a reader never sees a partial file.
"""

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"UQL1"
VERSION = 1
KIND_LOGITS = 0
KIND_PROBS = 1
KIND_SCORE = 2

_HEADER = struct.Struct("<4sIBHIQ")


def write_uql1(path, kind, num_classes, labels, values):
    """Write one log. ``values`` is (n, T, k) float; ``labels`` is (n,) int."""
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=np.float32)
    if values.ndim == 2:
        values = values[:, None, :]
    n, passes, k = values.shape
    if labels.shape != (n,):
        raise ValueError(f"labels shape {labels.shape} does not match n={n}")
    if kind != KIND_SCORE and k != num_classes:
        raise ValueError(f"value width {k} != class count {num_classes}")

    row = struct.Struct(f"<I{k}f")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, kind, passes, num_classes, n))
            for i in range(n):
                label = int(labels[i])
                for t in range(passes):
                    fh.write(row.pack(label, *values[i, t].tolist()))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
