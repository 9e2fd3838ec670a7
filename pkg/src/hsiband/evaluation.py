"""Classification accuracy of band subsets and threshold sweeps.

The reference classifier is 1-nearest-neighbour on raw uint16 spectra with
Euclidean distance. Distances are computed with float64 products of integer
samples, which stay exact below 2**53, so ties are genuine ties and are
broken by the lowest training pixel index.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .datamodel import Cube, GroundTruthMap
from .errors import (
    EmptyInputError,
    EmptySubsetError,
    EmptyTrainSetError,
    InvalidFractionError,
    LengthMismatchError,
    NoLabeledPixelsError,
)
from .selection import SelectionConfig, SelectionReport, greedy_select, rank_bands

CLASSIFIER_TAG = "1nn-euclidean"
SWEEP_HEADER = ("threshold", "n_bands", "bands", "accuracy_percent")
DEFAULT_THRESHOLDS = (0.0, -0.0035, -0.004, -0.005, -0.01, -0.02)

# test pixels per distance block; bounds the block matrix to ~chunk * n_train floats
_CHUNK = 1024


@dataclass(frozen=True)
class SplitAssignment:
    """Flat (row-major) pixel indices, each array sorted ascending."""

    train: np.ndarray
    test: np.ndarray
    seed: int
    fraction: float = 0.5


@dataclass(frozen=True)
class EvaluationResult:
    subset: tuple[int, ...]
    n_bands: int
    accuracy_percent: float
    classifier: str
    seed: int


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    n_bands: int
    bands: tuple[int, ...]
    accuracy_percent: Optional[float]


def stratified_split(gt: GroundTruthMap, fraction: float = 0.5, seed: int = 0) -> SplitAssignment:
    """Per-class seeded shuffle; the first ``ceil(fraction * n_c)`` pixels train."""
    if not 0.0 < fraction < 1.0:
        raise InvalidFractionError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    labels = gt.labels.reshape(-1)
    classes = np.unique(labels[labels != 0])
    if classes.size == 0:
        raise NoLabeledPixelsError("ground truth has no labelled pixels")

    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        n_train = math.ceil(fraction * idx.size)
        train.append(idx[:n_train])
        test.append(idx[n_train:])
    return SplitAssignment(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)),
                           seed, fraction)


def _features(cube: Cube, subset: Sequence[int], pixels: np.ndarray) -> np.ndarray:
    flat = cube.data.reshape(cube.bands, -1)
    return flat[np.asarray(subset, dtype=np.intp)][:, pixels].T.astype(np.float64)


def classify_1nn(cube: Cube, subset: Sequence[int], split: SplitAssignment,
                 gt: GroundTruthMap) -> np.ndarray:
    """Predicted labels for ``split.test`` (same order)."""
    subset = list(subset)
    if not subset:
        raise EmptySubsetError("band subset is empty")
    gt.check_pairs_with(cube)
    train = np.asarray(split.train, dtype=np.intp)
    test = np.asarray(split.test, dtype=np.intp)
    if train.size == 0:
        raise EmptyTrainSetError("training set is empty")

    # lowest pixel index first so argmin's first-hit rule breaks ties by index
    train = np.sort(train)
    labels = gt.labels.reshape(-1)
    train_labels = labels[train]
    x_train = _features(cube, subset, train)
    x_test = _features(cube, subset, test)
    train_sq = np.einsum("ij,ij->i", x_train, x_train)

    pred = np.empty(test.size, dtype=np.int64)
    for start in range(0, test.size, _CHUNK):
        block = x_test[start:start + _CHUNK]
        # the test norm is constant per row, so ||x||^2 - 2 x.t ranks neighbours
        d = train_sq[None, :] - 2.0 * (block @ x_train.T)
        pred[start:start + _CHUNK] = train_labels[np.argmin(d, axis=1)]
    return pred


def overall_accuracy(predictions, truth) -> float:
    predictions = np.asarray(predictions).reshape(-1)
    truth = np.asarray(truth).reshape(-1)
    if predictions.size != truth.size:
        raise LengthMismatchError(f"{predictions.size} predictions for {truth.size} labels")
    if truth.size == 0:
        raise EmptyInputError("no predictions to score")
    return 100.0 * float(np.count_nonzero(predictions == truth)) / truth.size


def evaluate_subset(cube: Cube, gt: GroundTruthMap, subset: Sequence[int],
                    split: SplitAssignment) -> EvaluationResult:
    pred = classify_1nn(cube, subset, split, gt)
    truth = gt.labels.reshape(-1)[np.asarray(split.test, dtype=np.intp)]
    acc = overall_accuracy(pred, truth)
    return EvaluationResult(tuple(int(b) for b in subset), len(subset), acc, CLASSIFIER_TAG,
                            split.seed)


def sweep(cube: Cube, gt: GroundTruthMap, thresholds: Iterable[float],
          config: SelectionConfig = SelectionConfig(),
          split: Optional[SplitAssignment] = None,
          snapshot_sizes: Optional[Sequence[int]] = None,
          evaluate: bool = True) -> tuple[list[SweepRow], list[SelectionReport]]:
    """Run one greedy selection per threshold and score its prefixes.

    ``snapshot_sizes`` restricts which prefix lengths are reported (default:
    every acceptance). With ``evaluate=False`` no classifier runs and
    ``accuracy_percent`` is ``None``.
    """
    thresholds = [float(t) for t in thresholds]
    if not thresholds:
        raise ValueError("at least one threshold is required")
    if evaluate and split is None:
        raise ValueError("a split is required when evaluate=True")

    ranking = rank_bands(cube, gt, config)
    rows, reports = [], []
    for th in thresholds:
        report = greedy_select(cube, gt, replace(config, threshold=th), ranking=ranking)
        reports.append(report)
        sizes = range(1, len(report.selected) + 1)
        if snapshot_sizes is not None:
            wanted = set(snapshot_sizes)
            sizes = [k for k in sizes if k in wanted]
        for k in sizes:
            bands = tuple(report.selected[:k])
            acc = evaluate_subset(cube, gt, bands, split).accuracy_percent if evaluate else None
            rows.append(SweepRow(th, k, bands, acc))
    return rows, reports


def format_number(x: float) -> str:
    return repr(float(x))


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        acc = "" if r.accuracy_percent is None else format_number(r.accuracy_percent)
        writer.writerow([format_number(r.threshold), r.n_bands, ";".join(map(str, r.bands)), acc])
    return buf.getvalue()


def _svm_line(label: int, vector: np.ndarray) -> str:
    return " ".join([str(int(label))] + [f"{i}:{int(v)}" for i, v in enumerate(vector, 1)])


def export_sparse(cube: Cube, gt: GroundTruthMap, subset: Sequence[int], split: SplitAssignment,
                  train_path, test_path) -> tuple[Path, Path]:
    """Write train/test pixels as ``label idx:value ...`` lines for external SVM tools.

    Every feature is written, zeros included, with 1-based indices in subset
    order.
    """
    subset = list(subset)
    if not subset:
        raise EmptySubsetError("band subset is empty")
    gt.check_pairs_with(cube)
    flat = cube.data.reshape(cube.bands, -1)[subset]
    labels = gt.labels.reshape(-1)
    paths = []
    for indices, path in ((split.train, train_path), (split.test, test_path)):
        path = Path(path)
        lines = [_svm_line(labels[p], flat[:, p]) for p in np.asarray(indices, dtype=np.intp)]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        paths.append(path)
    return paths[0], paths[1]
