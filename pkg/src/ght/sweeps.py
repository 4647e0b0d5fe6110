"""Threshold as a function of one GHT hyperparameter."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .histogram import Histogram
from .thresholders import GhtParams, ght

SWEEPABLE = ("nu", "tau", "kappa", "omega")


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """``nu``, ``tau`` and ``kappa`` sweep ``2**e`` for ``count`` evenly spaced
    exponents in ``[lo, hi]``; ``omega`` sweeps its value linearly."""

    param: str
    lo: float
    hi: float
    count: int
    base: GhtParams = GhtParams()

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise SweepError(f"unknown sweep parameter {self.param!r}; choose from {', '.join(SWEEPABLE)}")
        if int(self.count) != self.count or self.count < 2:
            raise SweepError(f"count must be an integer >= 2, got {self.count}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise SweepError("range bounds must be finite")
        if not self.lo < self.hi:
            raise SweepError(f"range must satisfy min < max, got [{self.lo}, {self.hi}]")
        if self.param == "omega" and not (0.0 <= self.lo and self.hi <= 1.0):
            raise SweepError("omega range must lie within [0, 1]")

    @property
    def log_scale(self) -> bool:
        return self.param != "omega"

    def grid(self) -> np.ndarray:
        g = np.linspace(self.lo, self.hi, int(self.count))
        return 2.0**g if self.log_scale else g


def sweep(h: Histogram, spec: SweepSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(values, thresholds)`` over the spec's grid."""
    values = spec.grid()
    ts = np.array([ght(h, replace(spec.base, **{spec.param: float(v)})).t for v in values])
    return values, ts


def sweep_csv(spec: SweepSpec, values, ts) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [spec.param] + ([f"{spec.param}_log2"] if spec.log_scale else []) + ["threshold"]
    w.writerow(header)
    exps = np.linspace(spec.lo, spec.hi, int(spec.count))
    for e, v, t in zip(exps, values, ts):
        row = [repr(float(v))] + ([repr(float(e))] if spec.log_scale else []) + [f"{t:.6f}"]
        w.writerow(row)
    return buf.getvalue()
