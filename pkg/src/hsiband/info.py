"""Discrete histograms, Shannon entropy and mutual information (bits)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyHistogramError,
    EmptyInputError,
    LengthMismatchError,
    SymbolOutOfRangeError,
)

# negative MI within this distance of zero is rounding noise
NEG_CLAMP = 1e-12


@dataclass(frozen=True)
class Histogram:
    levels: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def probs(self) -> np.ndarray:
        return self.counts / self.total


@dataclass(frozen=True)
class JointHistogram:
    """Co-occurrence counts of two symbol streams, rows indexed by ``a``."""

    levels_a: int
    levels_b: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def marginal_a(self) -> Histogram:
        return Histogram(self.levels_a, self.counts.sum(axis=1))

    def marginal_b(self) -> Histogram:
        return Histogram(self.levels_b, self.counts.sum(axis=0))

    def flattened(self) -> Histogram:
        return Histogram(self.levels_a * self.levels_b, self.counts.reshape(-1))

    def transpose(self) -> "JointHistogram":
        return JointHistogram(self.levels_b, self.levels_a, self.counts.T.copy())


def _symbols(seq, levels: int, name: str = "symbols") -> np.ndarray:
    arr = np.asarray(seq).reshape(-1)
    if arr.size == 0:
        raise EmptyInputError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise SymbolOutOfRangeError(f"{name} must be integers")
        arr = as_int
    arr = arr.astype(np.int64, copy=False)
    if arr.min() < 0 or arr.max() >= levels:
        raise SymbolOutOfRangeError(f"{name} must lie in [0, {levels})")
    return arr


def histogram(symbols, levels: int) -> Histogram:
    arr = _symbols(symbols, levels)
    return Histogram(levels, np.bincount(arr, minlength=levels))


def joint_histogram(a, b, levels_a: int, levels_b: int) -> JointHistogram:
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if a.size != b.size:
        raise LengthMismatchError(f"sequences differ in length: {a.size} vs {b.size}")
    a = _symbols(a, levels_a, "a")
    b = _symbols(b, levels_b, "b")
    flat = np.bincount(a * levels_b + b, minlength=levels_a * levels_b)
    return JointHistogram(levels_a, levels_b, flat.reshape(levels_a, levels_b))


def entropy(h: Histogram) -> float:
    total = h.total
    if total <= 0:
        raise EmptyHistogramError("entropy of an empty histogram is undefined")
    p = h.counts[h.counts > 0] / total
    return float(max(0.0, -np.sum(p * np.log2(p))))


def mutual_information(j: JointHistogram) -> float:
    """Shannon mutual information of a joint histogram, in bits.

    Sums ``p(a,b) * log2(p(a,b) / (p(a) p(b)))`` over occupied cells.
    """
    total = j.total
    if total <= 0:
        raise EmptyHistogramError("mutual information of an empty histogram is undefined")
    p = j.counts / total
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    ia, ib = np.nonzero(j.counts)
    pij = p[ia, ib]
    mi = float(np.sum(pij * np.log2(pij / (pa[ia] * pb[ib]))))
    if -NEG_CLAMP <= mi < 0.0:
        mi = 0.0
    return mi


def mutual_information_of(a, b, levels_a: int, levels_b: int, mask=None) -> float:
    """MI between two label grids, optionally restricted to ``mask``."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if a.size != mask.size or b.size != mask.size:
            raise LengthMismatchError("mask length differs from inputs")
        a, b = a[mask], b[mask]
    return mutual_information(joint_histogram(a, b, levels_a, levels_b))
