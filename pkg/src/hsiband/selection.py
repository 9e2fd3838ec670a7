"""Greedy forward band selection driven by mutual information with the GT.

Bands are ranked either by their own MI with the ground truth or by their
GLCM homogeneity. The top band seeds a running estimate of the ground truth;
each later band is averaged into the estimate and kept only if the MI of the
estimate with the ground truth changes by more than ``threshold`` bits.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .datamodel import (
    DEFAULT_MI_LEVELS,
    MAX_LABEL,
    Cube,
    GroundTruthMap,
    QuantizedBand,
    quantize_band,
)
from .errors import EmptyCubeError, InvalidLevelsError, LevelMismatchError, ShapeMismatchError
from .glcm import GlcmParams, band_homogeneity
from .info import mutual_information_of

GT_LEVELS = MAX_LABEL + 1


class RankingCriterion(enum.Enum):
    MUTUAL_INFORMATION = "mi"
    HOMOGENEITY = "homogeneity"

    @classmethod
    def parse(cls, value) -> "RankingCriterion":
        if isinstance(value, cls):
            return value
        aliases = {"mi": cls.MUTUAL_INFORMATION, "mutual_information": cls.MUTUAL_INFORMATION,
                   "homogeneity": cls.HOMOGENEITY, "glcm": cls.HOMOGENEITY}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown ranking criterion {value!r}") from None


@dataclass(frozen=True)
class SelectionConfig:
    criterion: RankingCriterion = RankingCriterion.MUTUAL_INFORMATION
    threshold: float = 0.0
    levels: int = DEFAULT_MI_LEVELS
    glcm: GlcmParams = field(default_factory=GlcmParams)
    max_bands: Optional[int] = None
    labeled_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "criterion", RankingCriterion.parse(self.criterion))
        object.__setattr__(self, "threshold", float(self.threshold))
        if self.levels < 2:
            raise InvalidLevelsError("MI quantization levels must be >= 2")
        if self.max_bands is not None and self.max_bands < 1:
            raise ValueError("max_bands must be >= 1 when given")
        if math.isnan(self.threshold):
            raise ValueError("threshold must not be NaN")


@dataclass(frozen=True)
class GtEstimate:
    values: np.ndarray
    levels: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class TraceEntry:
    band: int
    mi_before: float
    mi_after: float
    accepted: bool

    @property
    def delta(self) -> float:
        return self.mi_after - self.mi_before


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one greedy run.

    ``trace[0]`` records the seed band (``mi_before`` 0.0); it is accepted
    unconditionally. Every later entry obeys the threshold rule.
    """

    config: SelectionConfig
    ordering: list[int]
    scores: list[float]
    trace: list[TraceEntry]
    selected: list[int]
    final_mi: float

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "criterion": cfg.criterion.value,
            "threshold": cfg.threshold,
            "levels": cfg.levels,
            "glcm": cfg.glcm.to_dict(),
            "labeled_only": cfg.labeled_only,
            "ordering": list(self.ordering),
            "scores": list(self.scores),
            "trace": [
                {"band": t.band, "mi_before": t.mi_before, "mi_after": t.mi_after,
                 "accepted": t.accepted}
                for t in self.trace
            ],
            "selected": list(self.selected),
            "final_mi": self.final_mi,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict, max_bands: Optional[int] = None) -> "SelectionReport":
        g = doc["glcm"]
        config = SelectionConfig(
            criterion=doc["criterion"],
            threshold=doc["threshold"],
            levels=doc["levels"],
            glcm=GlcmParams(g["levels"], tuple(g["offset"]), g["symmetric"]),
            max_bands=max_bands,
            labeled_only=doc["labeled_only"],
        )
        trace = [TraceEntry(int(t["band"]), float(t["mi_before"]), float(t["mi_after"]),
                            bool(t["accepted"])) for t in doc["trace"]]
        return cls(config, [int(b) for b in doc["ordering"]], [float(s) for s in doc["scores"]],
                   trace, [int(b) for b in doc["selected"]], float(doc["final_mi"]))

    @classmethod
    def from_json(cls, text: str) -> "SelectionReport":
        return cls.from_dict(json.loads(text))

    def snapshots(self) -> list[list[int]]:
        """Selected-band prefixes after each acceptance."""
        return [self.selected[:k] for k in range(1, len(self.selected) + 1)]


def _check_inputs(cube: Cube, gt: GroundTruthMap) -> None:
    if cube.bands < 1:
        raise EmptyCubeError("cube has no bands")
    if cube.shape != gt.shape:
        raise ShapeMismatchError(f"cube {cube.shape} and ground truth {gt.shape} differ in shape")


def gt_mutual_information(values, gt: GroundTruthMap, levels: int, labeled_only: bool = False) -> float:
    """MI in bits between a quantized grid and the ground-truth labels."""
    mask = gt.labels != 0 if labeled_only else None
    return mutual_information_of(values, gt.labels, levels, GT_LEVELS, mask)


def band_scores(cube: Cube, gt: GroundTruthMap, config: SelectionConfig) -> list[float]:
    _check_inputs(cube, gt)
    if config.criterion is RankingCriterion.MUTUAL_INFORMATION:
        return [
            gt_mutual_information(quantize_band(cube.band(b), config.levels).values, gt,
                                  config.levels, config.labeled_only)
            for b in range(cube.bands)
        ]
    return [band_homogeneity(cube.band(b), config.glcm) for b in range(cube.bands)]


def order_by_score(scores: Sequence[float]) -> list[int]:
    """Indices sorted by descending score, ties by ascending index."""
    return sorted(range(len(scores)), key=lambda b: (-scores[b], b))


def rank_bands(cube: Cube, gt: GroundTruthMap, config: SelectionConfig):
    scores = band_scores(cube, gt, config)
    return order_by_score(scores), scores


def update_estimate(est: GtEstimate, band: QuantizedBand) -> GtEstimate:
    """Pixelwise mean of estimate and band, rounded half up."""
    if est.shape != band.shape:
        raise ShapeMismatchError(f"estimate {est.shape} and band {band.shape} differ in shape")
    if est.levels != band.levels:
        raise LevelMismatchError(f"estimate has {est.levels} levels, band has {band.levels}")
    return GtEstimate((est.values + band.values + 1) // 2, est.levels)


def greedy_select(cube: Cube, gt: GroundTruthMap, config: SelectionConfig,
                  ranking=None) -> SelectionReport:
    """Run one greedy forward selection pass.

    ``ranking`` may carry a precomputed ``(ordering, scores)`` pair from
    :func:`rank_bands` with the same criterion, to share it across thresholds.
    """
    _check_inputs(cube, gt)
    ordering, scores = ranking if ranking is not None else rank_bands(cube, gt, config)
    ordering, scores = list(ordering), [float(s) for s in scores]
    levels, labeled_only = config.levels, config.labeled_only

    first = ordering[0]
    q = quantize_band(cube.band(first), levels)
    est = GtEstimate(q.values, levels)
    mi_cur = gt_mutual_information(est.values, gt, levels, labeled_only)
    selected = [first]
    trace = [TraceEntry(first, 0.0, mi_cur, True)]
    limit = config.max_bands

    for b in ordering[1:]:
        if limit is not None and len(selected) >= limit:
            break
        cand = update_estimate(est, quantize_band(cube.band(b), levels))
        mi_new = gt_mutual_information(cand.values, gt, levels, labeled_only)
        accepted = mi_new - mi_cur > config.threshold
        trace.append(TraceEntry(b, mi_cur, mi_new, accepted))
        if accepted:
            est, mi_cur = cand, mi_new
            selected.append(b)

    return SelectionReport(config, ordering, scores, trace, selected, mi_cur)


def replay_estimate(cube: Cube, bands: Sequence[int], levels: int) -> GtEstimate:
    """Fold :func:`update_estimate` over ``bands`` in order."""
    est = GtEstimate(quantize_band(cube.band(bands[0]), levels).values, levels)
    for b in bands[1:]:
        est = update_estimate(est, quantize_band(cube.band(b), levels))
    return est


def verify_report(report: SelectionReport, cube: Cube, gt: GroundTruthMap,
                  tol: float = 1e-12) -> list[str]:
    """Replay a report from scratch; returns a list of discrepancies (empty if sound)."""
    cfg = report.config
    problems = []
    if not report.trace:
        return ["empty trace"]
    levels = cfg.levels
    seed = report.trace[0]
    if not seed.accepted or seed.band != report.ordering[0]:
        problems.append("trace does not start with the accepted top-ranked band")
    est = GtEstimate(quantize_band(cube.band(seed.band), levels).values, levels)
    mi_cur = gt_mutual_information(est.values, gt, levels, cfg.labeled_only)
    if abs(seed.mi_before) > tol or abs(seed.mi_after - mi_cur) > tol:
        problems.append(f"seed entry MI mismatch for band {seed.band}")
    selected = [seed.band]
    for t in report.trace[1:]:
        cand = update_estimate(est, quantize_band(cube.band(t.band), levels))
        mi_new = gt_mutual_information(cand.values, gt, levels, cfg.labeled_only)
        if abs(t.mi_before - mi_cur) > tol or abs(t.mi_after - mi_new) > tol:
            problems.append(f"band {t.band}: recorded MI differs from replay")
        if t.accepted != (t.mi_after - t.mi_before > cfg.threshold):
            problems.append(f"band {t.band}: accept flag contradicts threshold rule")
        if t.accepted:
            est, mi_cur = cand, mi_new
            selected.append(t.band)
    if selected != list(report.selected):
        problems.append("selected list differs from accepted trace entries")
    if abs(report.final_mi - mi_cur) > tol:
        problems.append("final_mi differs from replay")
    return problems
