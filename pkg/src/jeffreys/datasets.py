"""Dataset ingestion and serialization.

Three on-disk formats map to a :class:`WeightedHistogramSet`:

* CSV -- one histogram per row; an optional first column ``weight:<value>``
  carries the row weight (all rows or none).
* JSON -- ``{"histograms": [[...], ...], "weights": [...]}`` with the
  weights key optional.
* PGM -- binary 8-bit grayscale (P5); every image becomes one 256-bin
  intensity histogram, and a directory ingests every ``*.pgm`` inside.

Missing weights default to uniform; explicit weights are normalized to sum
to one.  Empty bins are smoothed with a small epsilon (overridable through
the ``JEFFREYS_EPSILON`` environment variable), and data declared as
frequency histograms must already sum to one per row, except PGM counts,
which are normalized after smoothing.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .histograms import (
    DEFAULT_EPSILON_SCALE,
    FrequencyHistogram,
    Histogram,
    RENORMALIZE_ATOL,
    WeightedHistogramSet,
    smooth_bins,
)

FORMAT_CSV = "csv"
FORMAT_JSON = "json"
FORMAT_PGM = "pgm-image"
FORMATS = (FORMAT_CSV, FORMAT_JSON, FORMAT_PGM)

KIND_POSITIVE = "positive"
KIND_FREQUENCY = "frequency"
KINDS = (KIND_POSITIVE, KIND_FREQUENCY)

EPSILON_ENV = "JEFFREYS_EPSILON"

_WEIGHT_PREFIX = "weight:"


@dataclass(frozen=True)
class DatasetFile:
    """A parsed dataset plus the ingestion settings that produced it."""

    format: str
    histograms: WeightedHistogramSet
    declared_kind: str
    epsilon_scale: float
    path: str


def epsilon_scale_from_env(override: float | None = None) -> float:
    """Smoothing scale: explicit override, else JEFFREYS_EPSILON, else default."""
    if override is not None:
        return float(override)
    raw = os.environ.get(EPSILON_ENV)
    if raw is None:
        return DEFAULT_EPSILON_SCALE
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValidationError(f"{EPSILON_ENV} must be a float, got {raw!r}") from exc
    if value <= 0.0:
        raise ValidationError(f"{EPSILON_ENV} must be positive, got {value!r}")
    return value


def _parse_csv(path: Path) -> tuple[np.ndarray, np.ndarray | None]:
    rows: list[list[float]] = []
    weights: list[float] = []
    has_weights: bool | None = None
    with open(path, newline="") as fh:
        for line_no, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            cells = [cell.strip() for cell in record]
            row_weight = None
            if cells[0].startswith(_WEIGHT_PREFIX):
                try:
                    row_weight = float(cells[0][len(_WEIGHT_PREFIX):])
                except ValueError as exc:
                    raise ValidationError(
                        f"{path}:{line_no}:1: malformed weight {cells[0]!r}"
                    ) from exc
                cells = cells[1:]
            if has_weights is None:
                has_weights = row_weight is not None
            elif has_weights != (row_weight is not None):
                raise ValidationError(
                    f"{path}:{line_no}: weight column must appear on all rows or none"
                )
            values = []
            for col_no, cell in enumerate(cells, start=1):
                try:
                    values.append(float(cell))
                except ValueError as exc:
                    raise ValidationError(
                        f"{path}:{line_no}:{col_no}: malformed value {cell!r}"
                    ) from exc
            if not values:
                raise ValidationError(f"{path}:{line_no}: empty histogram row")
            if rows and len(values) != len(rows[0]):
                raise ValidationError(
                    f"{path}:{line_no}: row has {len(values)} bins, expected {len(rows[0])}"
                )
            rows.append(values)
            if row_weight is not None:
                weights.append(row_weight)
    if not rows:
        raise ValidationError(f"{path}: no histograms found")
    return np.asarray(rows, dtype=np.float64), (np.asarray(weights) if has_weights else None)


def _parse_json(path: Path) -> tuple[np.ndarray, np.ndarray | None]:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(payload, dict) or "histograms" not in payload:
        raise ValidationError(f"{path}: expected an object with a 'histograms' key")
    try:
        rows = np.asarray(payload["histograms"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: histograms must be numeric rows") from exc
    if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
        raise ValidationError(f"{path}: histograms must form a non-empty 2-D array")
    weights = payload.get("weights")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (rows.shape[0],):
            raise ValidationError(
                f"{path}: weights length {weights.size} does not match {rows.shape[0]} histograms"
            )
    return rows, weights


def read_pgm(path: Path) -> np.ndarray:
    """Read a binary 8-bit PGM (P5) image into a flat array of pixel values."""
    data = Path(path).read_bytes()
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValidationError(f"{path}: truncated PGM header")
        return data[start:pos]

    if token() != b"P5":
        raise ValidationError(f"{path}: not a binary PGM (P5) file")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError as exc:
        raise ValidationError(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1:
        raise ValidationError(f"{path}: invalid PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValidationError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValidationError(f"{path}: PGM raster truncated")
    return np.frombuffer(raster, dtype=np.uint8)


def _intensity_histogram(pixels: np.ndarray) -> np.ndarray:
    return np.bincount(pixels, minlength=256).astype(np.float64)


def _parse_pgm(path: Path) -> tuple[np.ndarray, None]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.pgm"))
        if not files:
            raise ValidationError(f"{path}: directory contains no .pgm files")
    else:
        files = [p]
    rows = np.vstack([_intensity_histogram(read_pgm(f)) for f in files])
    return rows, None


def load_dataset(
    path,
    format: str,
    kind: str,
    epsilon_scale: float | None = None,
) -> DatasetFile:
    """Parse a dataset file into a weighted histogram set."""
    if format not in FORMATS:
        raise ValidationError(f"unknown format {format!r}; choose from {FORMATS}")
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; choose from {KINDS}")
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"{path}: no such file or directory")
    eps = epsilon_scale_from_env(epsilon_scale)

    parser = {FORMAT_CSV: _parse_csv, FORMAT_JSON: _parse_json, FORMAT_PGM: _parse_pgm}[format]
    rows, weights = parser(p)
    if np.any(rows < 0.0) or not np.all(np.isfinite(rows)):
        raise ValidationError(f"{path}: bins must be finite and non-negative")

    members = []
    for j, row in enumerate(rows):
        if kind == KIND_FREQUENCY and format != FORMAT_PGM:
            # Counts from images are normalized below; tabular data declared
            # as frequency must already be on the simplex.
            if abs(float(row.sum()) - 1.0) > RENORMALIZE_ATOL:
                raise ValidationError(
                    f"{path}: histogram {j} declared frequency but sums to {row.sum()!r}"
                )
        smoothed = smooth_bins(row, eps)
        if kind == KIND_FREQUENCY:
            members.append(FrequencyHistogram(smoothed / smoothed.sum()))
        else:
            members.append(Histogram(smoothed))

    if weights is None:
        weights = np.full(len(members), 1.0 / len(members))
    else:
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise ValidationError(f"{path}: weights must be finite and strictly positive")
        weights = weights / weights.sum()

    histograms = WeightedHistogramSet(tuple(members), weights)
    return DatasetFile(
        format=format,
        histograms=histograms,
        declared_kind=kind,
        epsilon_scale=eps,
        path=str(path),
    )


def parse_dataset(path, format: str, kind: str, epsilon_scale: float | None = None) -> WeightedHistogramSet:
    """Parse a dataset and return just the weighted histogram set."""
    return load_dataset(path, format, kind, epsilon_scale).histograms


def write_dataset(s: WeightedHistogramSet, path, format: str = FORMAT_JSON) -> None:
    """Serialize a set to CSV or JSON with round-trip exact decimals."""
    if format == FORMAT_JSON:
        # json emits floats with repr(), i.e. shortest round-trip decimals.
        payload = {
            "weights": [float(w) for w in s.weights],
            "histograms": [[float(v) for v in h.bins] for h in s.histograms],
        }
        Path(path).write_text(json.dumps(payload) + "\n")
    elif format == FORMAT_CSV:
        buf = io.StringIO()
        for h, w in zip(s.histograms, s.weights):
            cells = [f"{_WEIGHT_PREFIX}{float(w)!r}"] + [repr(float(v)) for v in h.bins]
            buf.write(",".join(cells) + "\n")
        Path(path).write_text(buf.getvalue())
    else:
        raise ValidationError(f"cannot write format {format!r}")
