"""Raster cube and label-grid data model.

Covers ingestion of band-sequential cubes (text header + raw little-endian
uint16 samples), comma-separated ground-truth maps, per-band quantization to
a small symbol alphabet, and a seeded synthetic cube generator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyBandError,
    InvalidLevelsError,
    InvalidSpecError,
    LabelOutOfRangeError,
    MalformedHeaderError,
    MissingFileError,
    ParseError,
    ShapeMismatchError,
    TruncatedDataError,
    UnsupportedFormatError,
)

logger = logging.getLogger(__name__)

MAX_LABEL = 16
U16_MAX = 65535
DEFAULT_MI_LEVELS = MAX_LABEL + 1

HEADER_KEYS = ("samples", "lines", "bands", "data type", "interleave", "byte order")
_INT_KEYS = ("samples", "lines", "bands", "data type", "byte order")
RAW_SUFFIXES = (".raw", "", ".img", ".bsq")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Cube:
    """Band stack of uint16 intensities, shape ``(bands, rows, cols)``."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ShapeMismatchError(f"cube must be 3-D with all dims >= 1, got {data.shape}")
        if data.dtype != np.uint16:
            if data.size and (data.min() < 0 or data.max() > U16_MAX):
                raise ValueError("cube samples must fit in uint16")
            data = data.astype(np.uint16)
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def from_samples(cls, bands: int, rows: int, cols: int, samples) -> "Cube":
        samples = np.asarray(samples)
        if bands < 1 or rows < 1 or cols < 1:
            raise ShapeMismatchError("bands, rows and cols must all be >= 1")
        if samples.size != bands * rows * cols:
            raise ShapeMismatchError(
                f"expected {bands * rows * cols} samples, got {samples.size}"
            )
        return cls(samples.reshape(bands, rows, cols))

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        """Spatial shape ``(rows, cols)``."""
        return self.data.shape[1], self.data.shape[2]

    @property
    def samples(self) -> np.ndarray:
        return self.data.reshape(-1)

    def band(self, b: int) -> np.ndarray:
        return self.data[b]

    def pixels(self, subset=None) -> np.ndarray:
        """Spectral vectors as a ``(rows*cols, n_bands)`` array."""
        data = self.data if subset is None else self.data[list(subset)]
        return data.reshape(data.shape[0], -1).T

    def __eq__(self, other):
        if not isinstance(other, Cube):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True)
class GroundTruthMap:
    """Per-pixel class labels in ``0..16``; 0 means unidentified."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or min(labels.shape) < 1:
            raise ShapeMismatchError(f"ground truth must be a non-empty 2-D grid, got {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() > MAX_LABEL):
            raise LabelOutOfRangeError(f"labels must lie in [0, {MAX_LABEL}]")
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))

    @property
    def rows(self) -> int:
        return self.labels.shape[0]

    @property
    def cols(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def check_pairs_with(self, cube: Cube) -> None:
        if self.shape != cube.shape:
            raise ShapeMismatchError(
                f"ground truth shape {self.shape} does not match cube shape {cube.shape}"
            )

    def __eq__(self, other):
        if not isinstance(other, GroundTruthMap):
            return NotImplemented
        return bool(np.array_equal(self.labels, other.labels))

    __hash__ = None


@dataclass(frozen=True)
class QuantizedBand:
    values: np.ndarray
    levels: int

    def __post_init__(self):
        values = np.asarray(self.values)
        if self.levels < 1:
            raise InvalidLevelsError("levels must be >= 1")
        if values.size and (values.min() < 0 or values.max() >= self.levels):
            raise ValueError(f"quantized values must lie in [0, {self.levels})")
        object.__setattr__(self, "values", _frozen(values.astype(np.int64)))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class SyntheticSpec:
    rows: int
    cols: int
    n_classes: int
    n_signal: int
    n_noise: int = 0
    n_redundant: int = 0
    noise_sigma: float = 0.0
    seed: int = 0

    @property
    def n_bands(self) -> int:
        return self.n_signal + self.n_noise + self.n_redundant

    def validate(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise InvalidSpecError("rows and cols must be >= 1")
        if not 1 <= self.n_classes <= MAX_LABEL:
            raise InvalidSpecError(f"n_classes must lie in [1, {MAX_LABEL}]")
        if min(self.n_signal, self.n_noise, self.n_redundant) < 0:
            raise InvalidSpecError("band counts must be non-negative")
        if self.n_bands < 1:
            raise InvalidSpecError("synthetic cube needs at least one band")
        if self.n_redundant and not self.n_signal:
            raise InvalidSpecError("redundant bands need at least one signal band to copy")
        if not np.isfinite(self.noise_sigma) or self.noise_sigma < 0:
            raise InvalidSpecError("noise_sigma must be finite and >= 0")
        if self.rows * self.cols < self.n_classes:
            raise InvalidSpecError("grid has fewer pixels than classes")

    def redundant_sources(self) -> list[int]:
        """Signal band duplicated by each redundant band (round-robin)."""
        return [j % self.n_signal for j in range(self.n_redundant)] if self.n_signal else []


# --------------------------------------------------------------------------
# Ingestion
# --------------------------------------------------------------------------

def read_header(header_path) -> dict:
    header_path = Path(header_path)
    if not header_path.is_file():
        raise MissingFileError(f"header file not found: {header_path}")
    try:
        text = header_path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedHeaderError(f"header is not UTF-8 text: {exc}") from exc

    header = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or (lineno == 1 and line == "ENVI"):
            continue
        if "=" not in line:
            raise MalformedHeaderError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in HEADER_KEYS:
            raise MalformedHeaderError(f"line {lineno}: unknown key {key!r}")
        if key in header:
            raise MalformedHeaderError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            try:
                header[key] = int(value)
            except ValueError:
                raise MalformedHeaderError(
                    f"line {lineno}: {key!r} must be an integer, got {value!r}"
                ) from None
        else:
            header[key] = value.lower()

    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise MalformedHeaderError(f"header is missing keys: {', '.join(missing)}")
    for key in ("samples", "lines", "bands"):
        if header[key] < 1:
            raise MalformedHeaderError(f"{key!r} must be >= 1")
    if header["data type"] != 12:
        raise UnsupportedFormatError(f"data type {header['data type']} is not 12 (uint16)")
    if header["interleave"] != "bsq":
        raise UnsupportedFormatError(f"interleave {header['interleave']!r} is not bsq")
    if header["byte order"] != 0:
        raise UnsupportedFormatError("only little-endian data (byte order = 0) is supported")
    return header


def raw_path_for(header_path) -> Path:
    """Locate the raw companion of a header; prefers ``<stem>.raw``."""
    header_path = Path(header_path)
    base = header_path.with_suffix("")
    for suffix in RAW_SUFFIXES:
        candidate = base.with_name(base.name + suffix)
        if candidate != header_path and candidate.is_file():
            return candidate
    raise MissingFileError(f"no raw data file found next to {header_path}")


def load_cube(header_path) -> Cube:
    """Load a band-sequential little-endian uint16 cube from its header path."""
    header = read_header(header_path)
    raw_path = raw_path_for(header_path)
    bands, rows, cols = header["bands"], header["lines"], header["samples"]
    raw = raw_path.read_bytes()
    expected = 2 * bands * rows * cols
    if len(raw) != expected:
        raise TruncatedDataError(
            f"{raw_path}: expected {expected} bytes for {bands}x{rows}x{cols}, found {len(raw)}"
        )
    samples = np.frombuffer(raw, dtype="<u2").astype(np.uint16)
    logger.debug("loaded cube %s: %d bands, %dx%d", raw_path, bands, rows, cols)
    return Cube.from_samples(bands, rows, cols, samples)


def write_cube(cube: Cube, header_path) -> tuple[Path, Path]:
    """Write ``cube`` as ``<stem>.hdr``-style header plus ``<stem>.raw``."""
    header_path = Path(header_path)
    raw_path = header_path.with_suffix(".raw")
    if raw_path == header_path:
        raise ValueError("header path must not end in .raw")
    lines = [
        f"samples = {cube.cols}",
        f"lines = {cube.rows}",
        f"bands = {cube.bands}",
        "data type = 12",
        "interleave = bsq",
        "byte order = 0",
    ]
    header_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    raw_path.write_bytes(cube.data.astype("<u2").tobytes())
    return header_path, raw_path


def load_ground_truth(path) -> GroundTruthMap:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"ground truth file not found: {path}")
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(f"{path}: ground truth file is empty")

    rows = []
    for lineno, line in enumerate(lines, 1):
        try:
            row = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: expected comma-separated integers") from None
        if rows and len(row) != len(rows[0]):
            raise ShapeMismatchError(
                f"{path}:{lineno}: row has {len(row)} values, expected {len(rows[0])}"
            )
        bad = [v for v in row if not 0 <= v <= MAX_LABEL]
        if bad:
            raise LabelOutOfRangeError(f"{path}:{lineno}: label {bad[0]} outside [0, {MAX_LABEL}]")
        rows.append(row)
    return GroundTruthMap(np.array(rows, dtype=np.int64))


def write_ground_truth(gt: GroundTruthMap, path) -> Path:
    path = Path(path)
    body = "\n".join(",".join(str(int(v)) for v in row) for row in gt.labels)
    path.write_text(body + "\n", encoding="utf-8")
    return path


# --------------------------------------------------------------------------
# Quantization
# --------------------------------------------------------------------------

def quantize_band(band, levels: int = DEFAULT_MI_LEVELS) -> QuantizedBand:
    """Linearly rescale a band onto ``levels`` symbols with round-half-up.

    ``q = floor((v - min) * (L - 1) / (max - min) + 1/2)``, evaluated in exact
    integer arithmetic. A constant band maps to all zeros.
    """
    if levels < 2:
        raise InvalidLevelsError(f"levels must be >= 2, got {levels}")
    band = np.asarray(band)
    if band.size == 0:
        raise EmptyBandError("cannot quantize an empty band")
    v = band.astype(np.int64)
    lo, hi = int(v.min()), int(v.max())
    if hi == lo:
        return QuantizedBand(np.zeros(v.shape, dtype=np.int64), levels)
    span = hi - lo
    q = (2 * (v - lo) * (levels - 1) + span) // (2 * span)
    return QuantizedBand(q, levels)


# --------------------------------------------------------------------------
# Synthetic cubes
# --------------------------------------------------------------------------

def synthetic_ground_truth(rows: int, cols: int, n_classes: int) -> np.ndarray:
    """Contiguous row-major blocks labelled 1..K; leftover pixels get label 0."""
    n = rows * cols
    block = n // n_classes
    flat = np.zeros(n, dtype=np.int64)
    flat[: block * n_classes] = np.repeat(np.arange(1, n_classes + 1), block)
    return flat.reshape(rows, cols)


def generate_synthetic(spec: SyntheticSpec) -> tuple[Cube, GroundTruthMap]:
    """Build a planted cube: signal bands, then noise bands, then duplicates."""
    spec.validate()
    labels = synthetic_ground_truth(spec.rows, spec.cols, spec.n_classes)
    # label k -> round_half_up(k * 65535 / K), so the top label hits the u16 ceiling
    clean = (2 * labels * U16_MAX + spec.n_classes) // (2 * spec.n_classes)

    rng = np.random.default_rng(spec.seed)
    shape = (spec.rows, spec.cols)
    bands = []
    for _ in range(spec.n_signal):
        if spec.noise_sigma > 0:
            noisy = np.rint(clean + rng.normal(0.0, spec.noise_sigma, size=shape))
            bands.append(np.clip(noisy, 0, U16_MAX).astype(np.uint16))
        else:
            bands.append(clean.astype(np.uint16))
    for _ in range(spec.n_noise):
        bands.append(rng.integers(0, U16_MAX, size=shape, endpoint=True, dtype=np.uint16))
    for src in spec.redundant_sources():
        bands.append(bands[src].copy())
    return Cube(np.stack(bands)), GroundTruthMap(labels)
