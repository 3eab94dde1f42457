import numpy as np
import pytest

from uqbench.errors import LogFormatError
from uqbench.predlog import (
    LogKind,
    load_csv,
    load_log,
    load_uql1,
    make_log,
    save_csv,
    save_uql1,
    stratified_split,
    subsample_class,
)


def probs_log(rows, labels, k=3):
    return make_log(LogKind.PROBS, k, labels, np.asarray(rows, dtype=np.float64))


class TestValidation:
    def test_minimal_probs_log(self):
        log = probs_log([[0.2, 0.7, 0.1]], [1])
        assert log.kind is LogKind.PROBS
        assert log.num_classes == 3
        assert log.n == 1

    def test_simplex_violation_reports_row(self):
        with pytest.raises(LogFormatError, match="row 1"):
            probs_log([[0.2, 0.7, 0.1], [0.2, 0.9, 0.1]], [1, 1])

    def test_probability_out_of_range(self):
        with pytest.raises(LogFormatError, match="outside"):
            probs_log([[-0.1, 1.0, 0.1]], [1])

    def test_label_out_of_range(self):
        with pytest.raises(LogFormatError, match="label out of range"):
            probs_log([[0.2, 0.7, 0.1]], [3])

    def test_non_finite_rejected(self):
        with pytest.raises(LogFormatError, match="non-finite"):
            make_log(LogKind.LOGITS, 2, [0], [[np.nan, 0.0]])

    def test_empty_log_rejected(self):
        with pytest.raises(LogFormatError):
            make_log(LogKind.LOGITS, 2, [], np.empty((0, 2)))

    def test_score_only_labels_are_correctness(self):
        with pytest.raises(LogFormatError, match="0/1"):
            make_log(LogKind.SCORE_ONLY, 2, [2], [[0.5]])


class TestCsv:
    def test_round_trip_value_identical(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("label,p_0,p_1,p_2\n1,0.2,0.7,0.1\n")
        log = load_csv(path)
        assert log.kind is LogKind.PROBS and log.num_classes == 3 and log.n == 1
        out = tmp_path / "copy.csv"
        save_csv(log, out)
        again = load_csv(out)
        np.testing.assert_array_equal(log.payload, again.payload)

    def test_simplex_error_carries_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,p_0,p_1,p_2\n1,0.2,0.7,0.1\n1,0.2,0.9,0.1\n")
        with pytest.raises(LogFormatError, match="row 1"):
            load_csv(path)

    def test_row_length_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,p_0,p_1,p_2\n1,0.2,0.7\n")
        with pytest.raises(LogFormatError, match="row length"):
            load_csv(path)

    def test_logits_and_score_headers(self, tmp_path):
        p1 = tmp_path / "a.csv"
        p1.write_text("label,logit_0,logit_1\n0,1.5,-0.5\n")
        assert load_csv(p1).kind is LogKind.LOGITS
        p2 = tmp_path / "b.csv"
        p2.write_text("label,score\n1,0.9\n0,0.2\n")
        log = load_csv(p2)
        assert log.kind is LogKind.SCORE_ONLY and log.width == 1

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("label,x,y\n0,1,2\n")
        with pytest.raises(LogFormatError, match="header"):
            load_csv(path)


class TestUql1:
    def test_round_trip_byte_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        log = make_log(
            LogKind.LOGITS, 1000,
            rng.integers(0, 1000, size=200),
            rng.normal(size=(200, 1000)).astype(np.float32).astype(np.float64),
        )
        p1 = tmp_path / "a.uql"
        save_uql1(log, p1)
        loaded = load_uql1(p1)
        p2 = tmp_path / "b.uql"
        save_uql1(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert loaded.kind is LogKind.LOGITS and loaded.num_classes == 1000

    def test_multi_pass_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        log = make_log(
            LogKind.LOGITS, 5, rng.integers(0, 5, size=7),
            rng.normal(size=(7, 3, 5)).astype(np.float32).astype(np.float64),
            passes=3,
        )
        path = tmp_path / "mc.uql"
        save_uql1(log, path)
        loaded = load_uql1(path)
        assert loaded.passes == 3
        np.testing.assert_array_equal(loaded.payload, log.payload)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.uql"
        path.write_bytes(b"NOPE" + b"\x00" * 30)
        with pytest.raises(LogFormatError, match="magic"):
            load_uql1(path)

    def test_truncated_body(self, tmp_path):
        rng = np.random.default_rng(2)
        log = make_log(LogKind.PROBS, 2, [0, 1],
                       np.array([[0.6, 0.4], [0.1, 0.9]]))
        path = tmp_path / "t.uql"
        save_uql1(log, path)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(LogFormatError, match="size"):
            load_uql1(path)

    def test_load_log_dispatch(self, tmp_path):
        log = make_log(LogKind.PROBS, 2, [0], [[0.6, 0.4]])
        save_uql1(log, tmp_path / "x.uql")
        assert load_log(tmp_path / "x.uql").n == 1
        with pytest.raises(LogFormatError, match="no such file"):
            load_log(tmp_path / "missing.uql")


class TestStratifiedSplit:
    def two_class_log(self, n=100):
        labels = np.arange(n) % 2
        payload = np.tile([0.6, 0.4], (n, 1))
        return make_log(LogKind.PROBS, 2, labels, payload)

    def test_exact_proportionality(self):
        log = self.two_class_log()
        split = stratified_split(log, 10, seed=7)
        labels = log.labels[split.calibration]
        assert (labels == 0).sum() == 5 and (labels == 1).sum() == 5

    def test_balanced_1000_classes(self):
        n, k = 50000, 1000
        labels = np.repeat(np.arange(k), n // k)
        payload = np.zeros((n, 1, 1))
        log = make_log(LogKind.SCORE_ONLY, 2, np.zeros(n, dtype=int), payload)
        # stratify on arbitrary class labels via a logits log
        log = make_log(LogKind.LOGITS, k, labels, np.zeros((n, k)))
        split = stratified_split(log, 5000, seed=0)
        counts = np.bincount(log.labels[split.calibration], minlength=k)
        assert (counts == 5).all()
        assert len(split.test) == 45000

    def test_deterministic_and_partition(self):
        log = self.two_class_log(37)
        s1 = stratified_split(log, 11, seed=42)
        s2 = stratified_split(log, 11, seed=42)
        np.testing.assert_array_equal(s1.calibration, s2.calibration)
        both = np.concatenate([s1.calibration, s1.test])
        assert np.array_equal(np.sort(both), np.arange(37))

    def test_oversized_calibration_rejected(self):
        log = self.two_class_log(10)
        with pytest.raises(LogFormatError):
            stratified_split(log, 10, seed=0)


class TestSubsample:
    def test_sizes(self):
        out = subsample_class(list(range(250)), 200, seed=0)
        assert len(out) == 200 and len(set(out)) == 200

    def test_identity_when_exact(self):
        assert subsample_class(list(range(200)), 200, seed=1) == list(range(200))

    def test_deterministic(self):
        a = subsample_class([10, 20, 30, 40, 50], 3, seed=9)
        b = subsample_class([10, 20, 30, 40, 50], 3, seed=9)
        assert a == b

    def test_undersized_rejected(self):
        with pytest.raises(LogFormatError):
            subsample_class([1, 2], 3, seed=0)
