"""Histograms and the per-split cumulative statistics shared by all thresholders.

A histogram is a pair of vectors: sorted bin locations ``x`` and nonnegative
counts ``n``.  Bins need not be evenly spaced, so a sorted list of samples
with unit counts is as valid an input as a 256-bin intensity histogram.

Split ``i`` puts bins ``0..i`` in class 0 and ``i+1..K-1`` in class 1, giving
``K - 1`` splits.  A threshold reported at ``x[i]`` therefore binarizes with
``value > t``.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

# Lower clamp applied to weights and variances before any division or log.
CLIP = 1e-30


class HistogramError(ValueError):
    pass


def clip(z):
    return np.maximum(CLIP, z)


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Histogram:
    """Bin centers ``x`` (nondecreasing) and raw counts ``n`` as float64."""

    x: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        x = _frozen(self.x)
        n = _frozen(self.n)
        if x.ndim != 1 or n.ndim != 1:
            raise HistogramError("x and n must be 1-d")
        if x.shape != n.shape:
            raise HistogramError(f"x and n differ in length ({len(x)} != {len(n)})")
        if len(x) < 2:
            raise HistogramError("histogram needs at least 2 bins")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(n))):
            raise HistogramError("x and n must be finite")
        if np.any(x[1:] < x[:-1]):
            raise HistogramError("bin locations x must be nondecreasing")
        if np.any(n < 0):
            raise HistogramError("counts n must be nonnegative")
        if not n.sum() > 0:
            raise HistogramError("histogram is empty (total count is zero)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "n", n)

    def __len__(self):
        return len(self.x)

    @property
    def total(self) -> float:
        return float(self.n.sum())

    def is_degenerate(self) -> bool:
        """True when at most one bin is populated, so no split is meaningful."""
        return int(np.count_nonzero(self.n)) < 2

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("x,n\n")
        for xi, ni in zip(self.x, self.n):
            buf.write(f"{float(xi)!r},{float(ni)!r}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as f:
                f.write(text)
        return text


def from_pixels(values) -> Histogram:
    """256-bin histogram of 8-bit intensities, ``x = 0..255``."""
    v = np.asarray(values)
    if v.size == 0:
        raise HistogramError("empty image")
    v = v.ravel()
    if v.dtype != np.uint8:
        if np.any(v < 0) or np.any(v > 255) or np.any(v != np.round(v)):
            raise HistogramError("pixel values must be integers in [0, 255]")
        v = v.astype(np.uint8)
    counts = np.bincount(v, minlength=256)
    return Histogram(np.arange(256, dtype=np.float64), counts.astype(np.float64))


def from_sorted_values(values) -> Histogram:
    """Treat each sample as its own bin with a count of one."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if len(v) < 2:
        raise HistogramError("need at least 2 values")
    if np.any(v[1:] < v[:-1]):
        raise HistogramError("values must be sorted in nondecreasing order")
    return Histogram(v, np.ones_like(v))


@dataclass(frozen=True, eq=False)
class SplitStats:
    """Per-split statistics below (0) and above (1) each of the K-1 splits.

    ``w`` are summed counts, ``p`` mixture fractions, ``mu`` weighted means and
    ``d`` distortions (count-weighted sums of squared deviations from the mean).
    Weights are clamped to ``CLIP`` and distortions to zero.
    """

    w0: np.ndarray
    w1: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray


def split_stats(h: Histogram) -> SplitStats:
    n, x = h.n, h.x
    # one cumulative pass over [n, n*x, n*x^2]; the upper sums are totals minus prefix
    moments = np.cumsum(np.stack([n, n * x, n * x * x]), axis=1)
    total = moments[:, -1:]
    below = moments[:, :-1]
    above = total - below

    w0 = clip(below[0])
    w1 = clip(above[0])
    p0 = w0 / (w0 + w1)
    p1 = w1 / (w0 + w1)
    mu0 = below[1] / w0
    mu1 = above[1] / w1
    d0 = np.maximum(0.0, below[2] - w0 * mu0**2)
    d1 = np.maximum(0.0, above[2] - w1 * mu1**2)
    return SplitStats(w0, w1, p0, p1, mu0, mu1, d0, d1)


def read_csv(path) -> Histogram:
    """Read a histogram from a CSV file with header ``x,n``."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="") as f:
        rows = [(i, r) for i, r in enumerate(csv.reader(f), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise HistogramError(f"{path}: empty file")
    header = [c.strip().lower() for c in rows[0][1]]
    if header != ["x", "n"]:
        raise HistogramError(f"{path}: expected header 'x,n', got {','.join(rows[0][1])!r}")
    xs, ns = [], []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise HistogramError(f"{path}:{lineno}: expected 2 columns")
        try:
            xs.append(float(row[0]))
            ns.append(float(row[1]))
        except ValueError as e:
            raise HistogramError(f"{path}:{lineno}: {e}") from None
    return Histogram(np.array(xs), np.array(ns))
