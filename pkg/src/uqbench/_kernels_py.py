"""Pure-numpy implementations of the rank/risk kernels.

Used when the compiled extension is unavailable or disabled via
``UQBENCH_PURE=1``. Both backends must agree bit-for-bit on float64 inputs;
``tests/test_backend.py`` checks parity.
"""

import numpy as np


def midranks(values):
    """1-based ranks with ties assigned the mean rank of their group."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    n = v.shape[0]
    order = np.argsort(v, kind="stable")
    sv = v[order]
    new = np.empty(n, dtype=bool)
    new[0] = True
    np.not_equal(sv[1:], sv[:-1], out=new[1:])
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], n)
    avg = (starts + ends + 1) / 2.0  # mean of 1-based ranks start+1 .. end
    block = np.cumsum(new) - 1
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = avg[block]
    return ranks


def grid_expected_errors(correct, scores):
    """Expected error counts among the top-i instances, i = 1..n.

    ``correct`` and ``scores`` must already be sorted by score descending
    (stable). Tied-score blocks are exchangeable: a cut inside a block takes
    the block's errors pro-rata, which is the expectation under a uniformly
    random tie order.
    """
    c = np.ascontiguousarray(correct, dtype=np.float64)
    s = np.ascontiguousarray(scores, dtype=np.float64)
    n = s.shape[0]
    errors = 1.0 - c
    new = np.empty(n, dtype=bool)
    new[0] = True
    np.not_equal(s[1:], s[:-1], out=new[1:])
    starts = np.flatnonzero(new)
    block_err = np.add.reduceat(errors, starts)
    sizes = np.diff(np.append(starts, n))
    before = np.concatenate(([0.0], np.cumsum(block_err)[:-1]))
    block = np.cumsum(new) - 1
    i = np.arange(1, n + 1, dtype=np.float64)
    taken = i - starts[block]
    return before[block] + taken * (block_err[block] / sizes[block])
