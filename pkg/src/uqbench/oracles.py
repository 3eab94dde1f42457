"""Brute-force reference implementations used to check the fast paths.

Each oracle recomputes its metric from the definition by a route that
shares no code with the production implementation: AUROC by exhaustive
pair comparison, AURC by per-threshold enumeration with per-instance
selection probabilities, ECE by naive two-pass binning, Spearman by
rank-then-Pearson from first principles. Intended for small inputs.
"""

from __future__ import annotations

import math

import numpy as np


def auroc_pair_count(scores, correctness) -> float:
    """Fraction of (correct, incorrect) pairs ranked concordantly, ties 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    correctness = np.asarray(correctness, dtype=bool)
    pos = scores[correctness]
    neg = scores[~correctness]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need at least one correct and one incorrect instance")
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((wins + 0.5 * ties) / (pos.size * neg.size))


def concordant_discordant(scores, correctness):
    """(c, d) pair counts of Goodman-Kruskal gamma over (score, loss) pairs.

    A pair is concordant when the higher-loss instance has the lower score.
    Tied pairs (in score or in loss) are excluded.
    """
    scores = np.asarray(scores, dtype=np.float64)
    loss = 1.0 - np.asarray(correctness, dtype=np.float64)
    c = d = 0
    n = scores.size
    for i in range(n):
        for j in range(i + 1, n):
            if loss[i] == loss[j] or scores[i] == scores[j]:
                continue
            if (loss[i] - loss[j]) * (scores[i] - scores[j]) < 0:
                c += 1
            else:
                d += 1
    return c, d


def aurc_enumeration(scores, correctness) -> float:
    """Mean selective risk over cut sizes 1..n by direct expectation.

    For each cut the inclusion probability of every instance is computed
    individually: 1 when its tie block lies fully above the cut, the
    block's taken-fraction when the cut falls inside its block.
    """
    scores = np.asarray(scores, dtype=np.float64)
    errors = 1.0 - np.asarray(correctness, dtype=np.float64)
    n = scores.size
    above = (scores[None, :] > scores[:, None]).sum(axis=1).astype(np.float64)
    block = (scores[None, :] == scores[:, None]).sum(axis=1).astype(np.float64)
    risks = []
    for i in range(1, n + 1):
        p_selected = np.clip((i - above) / block, 0.0, 1.0)
        risks.append(float((p_selected * errors).sum()) / i)
    return float(np.asarray(risks).mean())


def ece_two_pass(scores, correctness, bins) -> float:
    """Naive ECE: assign each score to its right-closed bin, then average gaps."""
    scores = list(map(float, scores))
    correctness = list(map(bool, correctness))
    members = {j: [] for j in range(1, bins + 1)}
    for idx, s in enumerate(scores):
        placed = None
        for j in range(1, bins + 1):
            lo, hi = (j - 1) / bins, j / bins
            if (s > lo or (s == 0.0 and j == 1)) and s <= hi:
                placed = j
                break
        if placed is None:
            raise ValueError(f"score {s} outside [0,1]")
        members[placed].append(idx)
    total = 0.0
    for j, idxs in members.items():
        if not idxs:
            continue
        acc = sum(correctness[i] for i in idxs) / len(idxs)
        conf = sum(scores[i] for i in idxs) / len(idxs)
        total += len(idxs) / len(scores) * abs(acc - conf)
    return total


def _pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


def spearman_rank_pearson(xs, ys) -> float:
    """Spearman via explicit fractional ranking then a hand-rolled Pearson."""

    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        out = [0.0] * len(v)
        i = 0
        while i < len(v):
            j = i
            while j < len(v) and v[order[j]] == v[order[i]]:
                j += 1
            avg = (i + 1 + j) / 2.0
            for q in range(i, j):
                out[order[q]] = avg
            i = j
        return out

    return _pearson(ranks(list(xs)), ranks(list(ys)))
