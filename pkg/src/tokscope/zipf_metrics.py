"""Rank-frequency statistics of token streams.

A token stream is reduced to a curve of (ln rank, ln count) points,
ranked by descending count with ties broken by ascending token id. Five
scalar metrics summarize a stream:

  compression    total token count of the stream
  cardinality    number of distinct token ids
  auc            area under the truncated log-log curve
  slope          OLS slope of the truncated log-log curve
  power_law      mean absolute deviation from that OLS line

All logarithms are natural. The curve is truncated at ln(rank) <= 6
before fitting and integration; compression and cardinality always see
the full stream. The area is computed by composite Simpson quadrature
on a uniform resampling of the piecewise-linear curve, which makes it
invariant to how the original ranks happen to be spaced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus_io import TokenSequence
from .stats import ols_fit, simpson_integrate

DEFAULT_TRUNCATION_BOUND = 6.0
SIMPSON_GRID = 2049
LOG_BASE = "e"

METRIC_NAMES = ("compression", "cardinality", "auc", "slope", "power_law")


@dataclass(frozen=True)
class TokenFrequencyTable:
    """Occurrence counts per token id, plus the stream total."""

    counts: dict[int, int]
    total: int

    def __post_init__(self):
        if not self.counts:
            raise ValueError("frequency table is empty")
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("counts must be positive")
        if sum(self.counts.values()) != self.total:
            raise ValueError("total does not match the sum of counts")


@dataclass(frozen=True)
class RankFrequencyCurve:
    """Points (ln rank, ln count), x strictly increasing."""

    points: np.ndarray
    truncation_bound: float = DEFAULT_TRUNCATION_BOUND

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if len(pts) and np.any(np.diff(pts[:, 0]) <= 0):
            raise ValueError("x values must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ZipfFit:
    """OLS line y = beta0 + beta1 * x over a log-log curve."""

    beta0: float
    beta1: float


@dataclass(frozen=True)
class MetricVector:
    compression: int
    cardinality: int
    auc: float
    slope: float
    power_law: float

    def as_features(self, names=METRIC_NAMES) -> np.ndarray:
        bad = [n for n in names if n not in METRIC_NAMES]
        if bad:
            raise ValueError(f"unknown metric names: {bad}")
        return np.array([float(getattr(self, n)) for n in names])


def count_frequencies(seq: TokenSequence) -> TokenFrequencyTable:
    if len(seq) == 0:
        raise ValueError("cannot count frequencies of an empty stream")
    ids, counts = np.unique(seq.tokens, return_counts=True)
    return TokenFrequencyTable(
        counts={int(i): int(c) for i, c in zip(ids, counts)},
        total=int(len(seq)),
    )


def compression(seq: TokenSequence) -> int:
    """Total token count; lower means the tokenizer compressed harder."""
    if len(seq) == 0:
        raise ValueError("empty stream")
    return len(seq)


def cardinality(table: TokenFrequencyTable) -> int:
    """Number of distinct token ids actually used."""
    return len(table.counts)


def ranked_counts(table: TokenFrequencyTable) -> np.ndarray:
    """Counts sorted by descending count, ties by ascending token id."""
    ids = np.fromiter(table.counts.keys(), dtype=np.int64, count=len(table.counts))
    counts = np.fromiter(table.counts.values(), dtype=np.int64, count=len(table.counts))
    order = np.lexsort((ids, -counts))
    return counts[order]


def rank_frequency_curve(
    table: TokenFrequencyTable,
    truncation_bound: float = DEFAULT_TRUNCATION_BOUND,
) -> RankFrequencyCurve:
    """Log-log curve of the table, truncated at ln(rank) <= truncation_bound."""
    counts = ranked_counts(table)
    ranks = np.arange(1, len(counts) + 1, dtype=np.float64)
    x = np.log(ranks)
    keep = x <= truncation_bound
    pts = np.column_stack([x[keep], np.log(counts[keep].astype(np.float64))])
    return RankFrequencyCurve(points=pts, truncation_bound=truncation_bound)


def zipf_fit(curve: RankFrequencyCurve) -> ZipfFit:
    if len(curve) < 2:
        raise ValueError("need at least 2 curve points to fit a line")
    beta0, beta1 = ols_fit(curve.points)
    return ZipfFit(beta0=beta0, beta1=beta1)


def power_law_deviation(curve: RankFrequencyCurve, fit: ZipfFit) -> float:
    """Mean absolute residual of the curve against its OLS line."""
    if len(curve) == 0:
        raise ValueError("empty curve")
    residuals = curve.y - (fit.beta0 + fit.beta1 * curve.x)
    return float(np.mean(np.abs(residuals)))


def auc(curve: RankFrequencyCurve, grid: int = SIMPSON_GRID) -> float:
    """Simpson area under the piecewise-linear curve on a uniform grid.

    The curve is resampled at `grid` evenly spaced x positions so the
    quadrature result does not depend on the original point spacing.
    """
    if len(curve) < 2:
        raise ValueError("need at least 2 curve points to integrate")
    if grid < 3 or grid % 2 == 0:
        raise ValueError("grid must be an odd integer >= 3")
    x, y = curve.x, curve.y
    xs = np.linspace(x[0], x[-1], grid)
    ys = np.interp(xs, x, y)
    return simpson_integrate(ys, (x[-1] - x[0]) / (grid - 1))


def metric_vector(
    seq: TokenSequence,
    truncation_bound: float = DEFAULT_TRUNCATION_BOUND,
) -> MetricVector:
    """All five metrics of a stream; fit and area use the truncated curve."""
    table = count_frequencies(seq)
    curve = rank_frequency_curve(table, truncation_bound)
    fit = zipf_fit(curve)
    return MetricVector(
        compression=compression(seq),
        cardinality=cardinality(table),
        auc=auc(curve),
        slope=fit.beta1,
        power_law=power_law_deviation(curve, fit),
    )


def metadata_block(truncation_bound: float = DEFAULT_TRUNCATION_BOUND) -> dict:
    """Provenance constants that make a serialized metric comparable."""
    bound = float(truncation_bound)
    if bound == math.floor(bound):
        bound = int(bound)
    return {"log_base": LOG_BASE, "truncation_bound": bound, "simpson_grid": SIMPSON_GRID}


def metric_vector_to_dict(
    mv: MetricVector,
    truncation_bound: float = DEFAULT_TRUNCATION_BOUND,
    **extra,
) -> dict:
    out = dict(extra)
    out.update(
        compression=mv.compression,
        cardinality=mv.cardinality,
        auc=mv.auc,
        slope=mv.slope,
        power_law=mv.power_law,
        metadata=metadata_block(truncation_bound),
    )
    return out


def metric_vector_from_dict(data: dict) -> MetricVector:
    try:
        return MetricVector(
            compression=int(data["compression"]),
            cardinality=int(data["cardinality"]),
            auc=float(data["auc"]),
            slope=float(data["slope"]),
            power_law=float(data["power_law"]),
        )
    except KeyError as e:
        raise ValueError(f"metric record is missing field {e.args[0]!r}") from None
