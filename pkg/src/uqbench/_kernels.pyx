# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled rank/risk kernels. Mirrors _kernels_py exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def midranks(values):
    """1-based ranks with ties assigned the mean rank of their group."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] order = np.argsort(v, kind="stable")
    cdef Py_ssize_t n = v.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ranks = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t start = 0, i, j
    cdef double avg
    for i in range(1, n + 1):
        if i == n or v[order[i]] != v[order[start]]:
            # block is [start, i); mean of 1-based ranks start+1 .. i
            avg = (start + i + 1) / 2.0
            for j in range(start, i):
                ranks[order[j]] = avg
            start = i
    return ranks


def grid_expected_errors(correct, scores):
    """Expected error counts among the top-i instances, i = 1..n.

    Inputs must be sorted by score descending; ties take the block's pooled
    errors pro-rata (expectation under a random tie order).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = np.ascontiguousarray(correct, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef Py_ssize_t n = s.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t start = 0, end, i
    cdef double before = 0.0, block_err, rate
    while start < n:
        end = start + 1
        block_err = 1.0 - c[start]
        while end < n and s[end] == s[start]:
            block_err += 1.0 - c[end]
            end += 1
        rate = block_err / (end - start)
        for i in range(start, end):
            out[i] = before + (i + 1 - start) * rate
        before += block_err
        start = end
    return out
