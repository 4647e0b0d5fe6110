"""Coordinate-descent search of GHT hyperparameters maximizing mean F1.

Parameters are searched as base-2 exponents.  ``nu`` and ``kappa`` may also
sit at exactly zero, stored as an exponent of ``-inf``; from there the only
move is back to the last finite exponent.  ``omega``'s exponent is capped at
0 so that ``omega <= 1``.

Because a global threshold on 8-bit pixels only matters through
``floor(t)``, every image's F1 is tabulated once for all 256 thresholds and a
candidate costs one histogram sweep per image.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .histogram import from_pixels
from .metrics import f1_by_threshold
from .thresholders import GhtParams, ght

PARAMS = ("nu", "tau", "kappa", "omega")
ZEROABLE = ("nu", "kappa")
QUANTUM = 0.125

DEFAULT_INIT = {"nu": 30.0, "tau": 3.0, "kappa": 22.0, "omega": -3.0}
COLD_INIT = {"nu": 0.0, "tau": 0.0, "kappa": 0.0, "omega": -1.0}


class TuneError(ValueError):
    pass


@dataclass(frozen=True)
class TuneConfig:
    init: dict = field(default_factory=lambda: dict(DEFAULT_INIT))
    steps: dict = field(default_factory=lambda: {p: 1.0 for p in PARAMS})
    shrink: float = 0.5
    max_sweeps: int = 40

    def __post_init__(self):
        if set(self.init) != set(PARAMS) or set(self.steps) != set(PARAMS):
            raise TuneError(f"init and steps need exactly the keys {PARAMS}")
        for p in PARAMS:
            if not self.steps[p] > 0:
                raise TuneError(f"step for {p} must be > 0")
            e = self.init[p]
            if math.isnan(e) or e == math.inf or (e == -math.inf and p not in ZEROABLE):
                raise TuneError(f"bad initial exponent for {p}: {e}")
        if self.init["omega"] > 0:
            raise TuneError("omega exponent must be <= 0")
        if not 0 < self.shrink < 1:
            raise TuneError("shrink must lie in (0, 1)")
        if self.max_sweeps < 1:
            raise TuneError("max_sweeps must be >= 1")

    @classmethod
    def cold(cls, **kw):
        return cls(init=dict(COLD_INIT), **kw)


def params_from_exponents(e: dict) -> GhtParams:
    return GhtParams.from_log2(**e)


def _quantize(e: float) -> float:
    return round(e / QUANTUM) * QUANTUM


class Objective:
    """Mean F1 over a corpus of ``(gray, gt)`` pairs as a function of GhtParams."""

    def __init__(self, corpus):
        corpus = list(corpus)
        if not corpus:
            raise TuneError("empty corpus")
        self.hists = []
        tables = []
        for gray, gt in corpus:
            self.hists.append(from_pixels(gray))
            gt = np.asarray(gt, dtype=bool)
            # index 0: t < 0 (no ink); index k + 1: floor(t) == k
            no_ink = 100.0 if not gt.any() else 0.0
            tables.append(np.concatenate([[no_ink], f1_by_threshold(gray, gt)]))
        self.tables = np.array(tables)

    def per_image(self, p: GhtParams) -> np.ndarray:
        out = np.empty(len(self.hists))
        for i, h in enumerate(self.hists):
            t = ght(h, p).t
            k = int(min(max(math.floor(t), -1), 255)) + 1
            out[i] = self.tables[i, k]
        return out

    def __call__(self, p: GhtParams) -> float:
        return float(np.mean(self.per_image(p)))


@dataclass
class TraceRow:
    sweep: int
    param: str
    exponents: dict
    mean_f1: float
    accepted: bool


@dataclass
class TuneResult:
    params: GhtParams
    exponents: dict
    mean_f1: float
    trace: list[TraceRow]

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sweep", "param", *(f"{p}_log2" for p in PARAMS), "mean_f1", "accepted"])
        for r in self.trace:
            w.writerow([r.sweep, r.param, *(repr(float(r.exponents[p])) for p in PARAMS), f"{r.mean_f1:.6f}", int(r.accepted)])
        return buf.getvalue()

    def params_json(self) -> str:
        doc = {
            "log2": {p: (None if self.exponents[p] == -math.inf else self.exponents[p]) for p in PARAMS},
            "values": {p: getattr(self.params, p) for p in PARAMS},
            "mean_f1": self.mean_f1,
        }
        return json.dumps(doc, indent=2) + "\n"


def _candidates(name, e, step, last_finite):
    if e == -math.inf:
        return [last_finite]
    cands = [_quantize(e - step), _quantize(e + step)]
    if name == "omega":
        cands = [c for c in cands if c <= 0]
    if name in ZEROABLE:
        cands.append(-math.inf)
    return [c for c in cands if c != e]


def tune(corpus, cfg: TuneConfig | None = None) -> TuneResult:
    """Maximize mean F1 of GHT over ``corpus`` (pairs of gray image, ink mask).

    Each sweep visits nu, tau, kappa, omega in order and moves a coordinate
    only on strict improvement.  After a sweep with no move every step is
    scaled by ``shrink``; the search ends once all steps fall below the
    0.125 exponent quantum or ``max_sweeps`` is reached.
    """
    cfg = TuneConfig() if cfg is None else cfg
    objective = corpus if isinstance(corpus, Objective) else Objective(corpus)
    cur = {p: (cfg.init[p] if cfg.init[p] == -math.inf else _quantize(cfg.init[p])) for p in PARAMS}
    last_finite = {p: (cur[p] if cur[p] != -math.inf else 0.0) for p in PARAMS}
    steps = dict(cfg.steps)
    best = objective(params_from_exponents(cur))
    trace = [TraceRow(0, "init", dict(cur), best, True)]

    for sweep in range(1, cfg.max_sweeps + 1):
        moved = False
        for name in PARAMS:
            step = max(steps[name], QUANTUM)
            best_cand, best_val, best_row = None, best, None
            for c in _candidates(name, cur[name], step, last_finite[name]):
                trial = dict(cur, **{name: c})
                val = objective(params_from_exponents(trial))
                row = TraceRow(sweep, name, trial, val, False)
                trace.append(row)
                if val > best_val:
                    best_cand, best_val, best_row = c, val, row
            if best_row is not None:
                best_row.accepted = True
                if best_cand != -math.inf:
                    last_finite[name] = best_cand
                cur[name] = best_cand
                best = best_val
                moved = True
        if not moved:
            steps = {p: s * cfg.shrink for p, s in steps.items()}
            if all(s < QUANTUM for s in steps.values()):
                break
    return TuneResult(params_from_exponents(cur), cur, best, trace)
