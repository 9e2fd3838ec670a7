import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsiband.datamodel import Cube, GroundTruthMap, SyntheticSpec, generate_synthetic
from hsiband.errors import (
    EmptyInputError,
    EmptySubsetError,
    EmptyTrainSetError,
    InvalidFractionError,
    LengthMismatchError,
    NoLabeledPixelsError,
)
from hsiband.evaluation import (
    DEFAULT_THRESHOLDS,
    SplitAssignment,
    classify_1nn,
    evaluate_subset,
    export_sparse,
    overall_accuracy,
    stratified_split,
    sweep,
    sweep_csv,
)
from hsiband.selection import SelectionConfig, greedy_select

import oracles


class TestSplit:
    def test_ceil_rule(self):
        gt = GroundTruthMap(np.array([[1, 1, 2, 2, 2, 0]]))
        s = stratified_split(gt, 0.5, seed=9)
        labels = gt.labels.reshape(-1)
        assert np.count_nonzero(labels[s.train] == 1) == 1
        assert np.count_nonzero(labels[s.train] == 2) == 2
        assert sorted(np.concatenate([s.train, s.test]).tolist()) == [0, 1, 2, 3, 4]

    def test_deterministic(self):
        gt = GroundTruthMap(np.random.default_rng(0).integers(0, 5, size=(20, 20)))
        a, b = stratified_split(gt, 0.5, 3), stratified_split(gt, 0.5, 3)
        assert np.array_equal(a.train, b.train) and np.array_equal(a.test, b.test)
        c = stratified_split(gt, 0.5, 4)
        assert not np.array_equal(a.train, c.train)

    def test_errors(self):
        with pytest.raises(NoLabeledPixelsError):
            stratified_split(GroundTruthMap(np.zeros((3, 3), dtype=int)))
        gt = GroundTruthMap(np.ones((3, 3), dtype=int))
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(InvalidFractionError):
                stratified_split(gt, bad)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 16), min_size=1, max_size=80).filter(any),
           st.floats(0.05, 0.95), st.integers(0, 2**63 - 1))
    def test_partition(self, labels, fraction, seed):
        gt = GroundTruthMap(np.array([labels]))
        s = stratified_split(gt, fraction, seed)
        flat = np.array(labels)
        assert not set(s.train.tolist()) & set(s.test.tolist())
        assert set(s.train.tolist()) | set(s.test.tolist()) == set(np.flatnonzero(flat).tolist())
        for c in set(labels) - {0}:
            n_c = labels.count(c)
            assert np.count_nonzero(flat[s.train] == c) == math.ceil(fraction * n_c)


def _cube_from_pixels(vectors):
    """Cube of shape (bands, 1, n_pixels) from a list of spectra."""
    arr = np.array(vectors, dtype=np.uint16).T
    return Cube(arr[:, None, :])


class TestClassify:
    def test_identical_spectrum(self):
        cube = _cube_from_pixels([[10, 10], [500, 500], [11, 10]])
        gt = GroundTruthMap(np.array([[3, 7, 3]]))
        split = SplitAssignment(np.array([0, 1]), np.array([2]), 0)
        assert classify_1nn(cube, [0, 1], split, gt).tolist() == [3]

    def test_tie_goes_to_lower_index(self):
        cube = _cube_from_pixels([[10], [20], [15]])
        gt = GroundTruthMap(np.array([[4, 2, 1]]))
        split = SplitAssignment(np.array([1, 0]), np.array([2]), 0)
        assert classify_1nn(cube, [0], split, gt).tolist() == [4]

    def test_errors(self):
        cube = _cube_from_pixels([[1], [2]])
        gt = GroundTruthMap(np.array([[1, 2]]))
        with pytest.raises(EmptySubsetError):
            classify_1nn(cube, [], SplitAssignment(np.array([0]), np.array([1]), 0), gt)
        with pytest.raises(EmptyTrainSetError):
            classify_1nn(cube, [0], SplitAssignment(np.array([], dtype=int), np.array([1]), 0), gt)

    def test_matches_naive(self):
        rng = np.random.default_rng(8)
        # small alphabet forces many exact distance ties
        data = rng.integers(0, 4, size=(3, 6, 6)) * 20000
        cube = Cube(data.astype(np.uint16))
        gt = GroundTruthMap(rng.integers(1, 5, size=(6, 6)))
        split = stratified_split(gt, 0.5, 1)
        pix = cube.pixels([0, 2])
        labels = gt.labels.reshape(-1)
        naive = oracles.nearest_neighbour_naive(
            pix[split.train].tolist(), labels[split.train].tolist(), pix[split.test].tolist())
        assert classify_1nn(cube, [0, 2], split, gt).tolist() == naive

    def test_noise_free_signal_is_perfect(self):
        cube, gt = generate_synthetic(SyntheticSpec(32, 32, 8, n_signal=3, n_noise=2, seed=1))
        split = stratified_split(gt, 0.5, 0)
        assert evaluate_subset(cube, gt, [0, 1, 2], split).accuracy_percent == 100.0

    def test_train_equals_test_distinct_spectra(self):
        rng = np.random.default_rng(2)
        cube = Cube(rng.permutation(65536)[:2 * 64].reshape(2, 8, 8).astype(np.uint16))
        gt = GroundTruthMap(rng.integers(1, 17, size=(8, 8)))
        every = np.arange(64)
        result = evaluate_subset(cube, gt, [0, 1], SplitAssignment(every, every, 0))
        assert result.accuracy_percent == 100.0

    def test_band_order_invariant(self, planted):
        cube, gt = planted
        split = stratified_split(gt, 0.5, 5)
        a = evaluate_subset(cube, gt, [0, 7, 3, 12], split).accuracy_percent
        b = evaluate_subset(cube, gt, [12, 3, 0, 7], split).accuracy_percent
        assert a == b


def test_overall_accuracy():
    assert overall_accuracy([1, 2, 3, 4], [1, 2, 3, 5]) == 75.0
    assert overall_accuracy([1, 2], [1, 2]) == 100.0
    with pytest.raises(EmptyInputError):
        overall_accuracy([], [])
    with pytest.raises(LengthMismatchError):
        overall_accuracy([1], [1, 2])


class TestEvaluate:
    def test_selected_beats_noise(self, planted):
        cube, gt = planted
        split = stratified_split(gt, 0.5, 0)
        sel = greedy_select(cube, gt, SelectionConfig()).selected
        noise = list(range(5, 5 + len(sel)))
        assert (evaluate_subset(cube, gt, sel, split).accuracy_percent
                > evaluate_subset(cube, gt, noise, split).accuracy_percent)

    def test_constant_band_in_range(self):
        cube = Cube(np.full((1, 4, 4), 7, dtype=np.uint16))
        gt = GroundTruthMap(np.arange(16).reshape(4, 4) % 3 + 1)
        split = stratified_split(gt, 0.5, 0)
        res = evaluate_subset(cube, gt, [0], split)
        assert 0.0 <= res.accuracy_percent <= 100.0
        assert res == evaluate_subset(cube, gt, [0], split)
        assert res.n_bands == 1 and res.classifier == "1nn-euclidean"


class TestSweep:
    def test_rows_grouped_per_threshold(self, planted):
        cube, gt = planted
        split = stratified_split(gt, 0.5, 0)
        rows, reports = sweep(cube, gt, DEFAULT_THRESHOLDS, SelectionConfig(), split)
        assert len(reports) == 6
        seen = [r.threshold for r in rows]
        assert list(dict.fromkeys(seen)) == list(DEFAULT_THRESHOLDS)
        for th, rep in zip(DEFAULT_THRESHOLDS, reports):
            mine = [r for r in rows if r.threshold == th]
            assert [r.n_bands for r in mine] == list(range(1, len(rep.selected) + 1))
            assert mine[-1].bands == tuple(rep.selected)

    def test_zero_threshold_keeps_at_most_signal_count(self, planted):
        cube, gt = planted
        _, reports = sweep(cube, gt, [0.0], SelectionConfig(), evaluate=False)
        assert len(reports[0].selected) <= 5

    def test_duplicate_only_counts(self):
        cube, gt = generate_synthetic(SyntheticSpec(16, 16, 4, 1, 0, 9, 300.0, seed=0))
        _, reports = sweep(cube, gt, [0.0, -0.01], SelectionConfig(), evaluate=False)
        assert [len(r.selected) for r in reports] == [1, 10]

    def test_snapshots_and_no_eval(self, planted):
        cube, gt = planted
        rows, _ = sweep(cube, gt, [-0.02], SelectionConfig(), snapshot_sizes=[2, 3, 99],
                        evaluate=False)
        assert [r.n_bands for r in rows] == [2, 3]
        assert all(r.accuracy_percent is None for r in rows)

    def test_pure_function(self, planted):
        cube, gt = planted
        split = stratified_split(gt, 0.5, 11)
        a = sweep_csv(sweep(cube, gt, [0.0, -0.01], SelectionConfig(), split)[0])
        b = sweep_csv(sweep(cube, gt, [0.0, -0.01], SelectionConfig(), split)[0])
        assert a == b
        assert a.splitlines()[0] == "threshold,n_bands,bands,accuracy_percent"

    def test_requires_split_or_no_eval(self, planted):
        cube, gt = planted
        with pytest.raises(ValueError):
            sweep(cube, gt, [0.0], SelectionConfig())
        with pytest.raises(ValueError):
            sweep(cube, gt, [], SelectionConfig(), evaluate=False)


def test_export_format(tmp_path):
    cube = _cube_from_pixels([[0, 5, 9], [1, 0, 65535], [7, 7, 7], [3, 2, 1]])
    gt = GroundTruthMap(np.array([[2, 16, 0, 4]]))
    split = SplitAssignment(np.array([0, 3]), np.array([1]), 0)
    train, test = export_sparse(cube, gt, [2, 0], split, tmp_path / "a.train", tmp_path / "a.test")
    assert train.read_text() == "2 1:9 2:0\n4 1:1 2:3\n"
    assert test.read_text() == "16 1:65535 2:1\n"
