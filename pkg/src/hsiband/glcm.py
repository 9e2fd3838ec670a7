"""Gray-level co-occurrence matrices and the homogeneity statistic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import QuantizedBand, quantize_band
from .errors import InvalidLevelsError, LevelOverflowError, NoPairsError

DEFAULT_GLCM_LEVELS = 8


@dataclass(frozen=True)
class GlcmParams:
    levels: int = DEFAULT_GLCM_LEVELS
    offset: tuple[int, int] = (0, 1)
    symmetric: bool = True

    def __post_init__(self):
        if self.levels < 2:
            raise InvalidLevelsError("GLCM levels must be >= 2")
        offset = tuple(int(d) for d in self.offset)
        if len(offset) != 2 or offset == (0, 0):
            raise ValueError("GLCM offset must be a non-zero (drow, dcol) pair")
        object.__setattr__(self, "offset", offset)

    def to_dict(self) -> dict:
        return {"levels": self.levels, "offset": list(self.offset), "symmetric": self.symmetric}


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Co-occurrence weights; ``probs`` is their normalization.

    Raw pair counts are kept so that statistics on purely diagonal matrices
    come out exact.
    """

    levels: int
    counts: np.ndarray

    @classmethod
    def from_probs(cls, probs) -> "CooccurrenceMatrix":
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] != probs.shape[1]:
            raise ValueError("co-occurrence matrix must be square")
        if (probs < 0).any() or probs.sum() <= 0:
            raise ValueError("co-occurrence weights must be non-negative with positive mass")
        return cls(probs.shape[0], probs)

    @property
    def probs(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def glcm(image: QuantizedBand, params: GlcmParams = GlcmParams()) -> CooccurrenceMatrix:
    values = np.asarray(image.values if isinstance(image, QuantizedBand) else image)
    levels = params.levels
    if values.size and values.max() >= levels:
        raise LevelOverflowError(f"image value {values.max()} exceeds GLCM levels {levels}")
    dr, dc = params.offset
    rows, cols = values.shape
    if abs(dr) >= rows or abs(dc) >= cols:
        raise NoPairsError(f"{rows}x{cols} image has no pixel pairs at offset {params.offset}")

    # reference pixels p and neighbours p + offset, both in bounds
    r0, r1 = max(0, -dr), rows - max(0, dr)
    c0, c1 = max(0, -dc), cols - max(0, dc)
    ref = values[r0:r1, c0:c1].astype(np.int64)
    nbr = values[r0 + dr:r1 + dr, c0 + dc:c1 + dc].astype(np.int64)
    counts = np.bincount((ref * levels + nbr).ravel(), minlength=levels * levels)
    counts = counts.reshape(levels, levels)
    if params.symmetric:
        counts = counts + counts.T
    return CooccurrenceMatrix(levels, counts)


def homogeneity_weights(levels: int) -> np.ndarray:
    i, j = np.indices((levels, levels))
    return 1.0 / (1.0 + (i - j) ** 2)


def homogeneity(c: CooccurrenceMatrix) -> float:
    """Inverse difference moment: sum of P(i,j) / (1 + (i-j)^2)."""
    weights = np.asarray(c.counts, dtype=np.float64)
    return float(np.sum(weights * homogeneity_weights(c.levels)) / np.sum(weights))


def band_homogeneity(band, params: GlcmParams = GlcmParams()) -> float:
    return homogeneity(glcm(quantize_band(band, params.levels), params))
