"""Parity between the compiled kernels and the numpy fallback."""

import numpy as np
import pytest

from uqbench import _backend, _kernels_py

try:
    from uqbench import _kernels
except ImportError:
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="extension not built")


def random_inputs(seed, n=1000):
    rng = np.random.default_rng(seed)
    scores = np.round(rng.normal(size=n), 2)  # plenty of ties
    order = np.argsort(-scores, kind="stable")
    correct = (rng.random(n) < 0.7).astype(np.float64)
    return scores, order, correct


def test_midranks_against_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    scores, _, _ = random_inputs(0)
    np.testing.assert_array_equal(
        _backend.midranks(scores), scipy_stats.rankdata(scores, method="average")
    )


@needs_ext
def test_midranks_parity():
    for seed in range(5):
        scores, _, _ = random_inputs(seed)
        np.testing.assert_array_equal(
            _kernels.midranks(scores), _kernels_py.midranks(scores)
        )


@needs_ext
def test_grid_expected_errors_parity():
    for seed in range(5):
        scores, order, correct = random_inputs(seed)
        s, c = scores[order], correct[order]
        np.testing.assert_array_equal(
            _kernels.grid_expected_errors(c, s),
            _kernels_py.grid_expected_errors(c, s),
        )


def test_grid_expected_errors_tie_free():
    s = np.array([4.0, 3.0, 2.0, 1.0])
    c = np.array([1.0, 0.0, 1.0, 0.0])
    np.testing.assert_array_equal(
        _backend.grid_expected_errors(c, s), [0.0, 1.0, 1.0, 2.0]
    )


def test_grid_expected_errors_single_block():
    s = np.full(5, 0.5)
    c = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
    expected = np.arange(1, 6) * (3 / 5)
    np.testing.assert_allclose(_backend.grid_expected_errors(c, s), expected)
