"""Generalized histogram thresholding and the classic methods it contains.

Every thresholder scores all K-1 splits of a histogram and returns the bin
location of the best split, averaging the locations of exactly tied splits.

Special cases of :func:`ght`:

* ``nu = kappa = 0`` is minimum error thresholding (:func:`met`).
* ``nu -> inf, tau -> 0, kappa = 0`` is Otsu's method (:func:`otsu`).
* ``nu = 0, kappa -> inf`` is the ``omega`` weighted percentile (:func:`wprctile`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernel
from .histogram import CLIP, Histogram, clip, split_stats

# Finite stand-ins for the infinite limits above.
NEAR_INF = 1e60
NEAR_ZERO = 1e-15


@dataclass(frozen=True)
class GhtParams:
    """Prior strength ``nu``, prior scale ``tau``, beta concentration ``kappa``
    and beta mode ``omega``."""

    nu: float = 0.0
    tau: float = 0.0
    kappa: float = 0.0
    omega: float = 0.5

    def __post_init__(self):
        for name in ("nu", "tau", "kappa", "omega"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or math.isnan(v):
                raise ValueError(f"{name} must be a real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"omega must lie in [0, 1], got {self.omega}")

    @property
    def alpha(self) -> float:
        return self.kappa * self.omega + 1.0

    @property
    def beta(self) -> float:
        return self.kappa * (1.0 - self.omega) + 1.0

    @classmethod
    def from_log2(cls, nu=None, tau=None, kappa=None, omega=None):
        """Build from base-2 exponents; ``None`` leaves a parameter at 0 (omega: 0.5)."""
        return cls(
            nu=0.0 if nu is None else 2.0**nu,
            tau=0.0 if tau is None else 2.0**tau,
            kappa=0.0 if kappa is None else 2.0**kappa,
            omega=0.5 if omega is None else 2.0**omega,
        )


# Hyperparameters of the tuned model and its ablations on handwritten documents.
TUNED_GHT = GhtParams.from_log2(nu=29.5, tau=3.125, kappa=22.25, omega=-3.25)
OTSU_CASE = GhtParams(nu=NEAR_INF, tau=NEAR_ZERO)
MET_CASE = GhtParams()
WPRCTILE_OMEGA = 2.0**-3.75


def wprctile_case(omega: float) -> GhtParams:
    return GhtParams(kappa=NEAR_INF, omega=omega)


class ThresholdResult(NamedTuple):
    """Chosen threshold, the per-split score curve, and the maximizing splits.

    For MET and the weighted percentile, ``scores`` is the cost they minimize.
    """

    t: float
    scores: np.ndarray
    argmax_indices: np.ndarray


def argmax_mean_ties(x, scores):
    """Return ``(t, indices)``: the mean of ``x[i]`` over all maximizing splits.

    Ties use exact float equality.  Only ``x[:-1]`` are candidates.
    """
    x = np.asarray(x, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    if len(scores) != len(x) - 1:
        raise ValueError(f"expected {len(x) - 1} scores for {len(x)} bins, got {len(scores)}")
    idx = np.flatnonzero(scores == np.max(scores))
    if len(idx) == 0:
        raise ValueError("scores contain NaN")
    return float(np.mean(x[:-1][idx])), idx


def _result(h, scores):
    t, idx = argmax_mean_ties(h.x, scores)
    return ThresholdResult(t, scores, idx)


def ght_scores(h: Histogram, p: GhtParams, stats=None) -> np.ndarray:
    """Per-split GHT log-likelihood score (up to a global shift and scale)."""
    s = split_stats(h) if stats is None else stats
    nu, tau2, kappa, omega = p.nu, p.tau**2, p.kappa, p.omega
    v0 = clip((s.p0 * nu * tau2 + s.d0) / (s.p0 * nu + s.w0))
    v1 = clip((s.p1 * nu * tau2 + s.d1) / (s.p1 * nu + s.w1))
    f0 = -s.d0 / v0 - s.w0 * np.log(v0) + 2 * (s.w0 + kappa * omega) * np.log(s.w0)
    f1 = -s.d1 / v1 - s.w1 * np.log(v1) + 2 * (s.w1 + kappa * (1 - omega)) * np.log(s.w1)
    return f0 + f1


def ght(h: Histogram, p: GhtParams = MET_CASE) -> ThresholdResult:
    """Generalized histogram thresholding of ``h`` under hyperparameters ``p``."""
    if _kernel.HAVE_NUMBA:
        scores, idx, t = _kernel.ght_sweep(h.n, h.x, p.nu, p.tau, p.kappa, p.omega)
        return ThresholdResult(t, scores, idx)
    return _result(h, ght_scores(h, p))


def met_scores(h: Histogram, stats=None) -> np.ndarray:
    """Kittler-Illingworth criterion; lower is better."""
    s = split_stats(h) if stats is None else stats
    # per-side terms added last so mirrored splits tie exactly
    l0 = s.w0 * np.log(clip(s.d0 / s.w0)) - 2 * s.w0 * np.log(clip(s.w0))
    l1 = s.w1 * np.log(clip(s.d1 / s.w1)) - 2 * s.w1 * np.log(clip(s.w1))
    return 1 + (l0 + l1)


def met(h: Histogram) -> ThresholdResult:
    """Minimum error thresholding.  ``scores`` holds the criterion to minimize."""
    ell = met_scores(h)
    t, idx = argmax_mean_ties(h.x, -ell)
    return ThresholdResult(t, ell, idx)


def otsu(h: Histogram) -> ThresholdResult:
    """Otsu's method via between-class variance ``w0 * w1 * (mu0 - mu1)**2``."""
    s = split_stats(h)
    return _result(h, s.w0 * s.w1 * (s.mu0 - s.mu1) ** 2)


def otsu_distortion_form(h: Histogram) -> ThresholdResult:
    """Otsu's method written as total variance minus within-class distortion."""
    s = split_stats(h)
    n, x = h.n, h.x
    total = np.sum(n)
    o = total * np.sum(n * x**2) - np.sum(n * x) ** 2 - total * (s.d0 + s.d1)
    return _result(h, o)


def wprctile(h: Histogram, omega: float = 0.5) -> ThresholdResult:
    """Weighted percentile: the split whose lower mass fraction is nearest ``omega``.

    ``scores`` holds the cross-entropy to minimize.
    """
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    s = split_stats(h)
    # p0, p1 come from clipped weights and are already positive; clipping them
    # again would under-penalize splits with an empty side.
    cost = -omega * np.log(s.p0) - (1.0 - omega) * np.log(s.p1)
    t, idx = argmax_mean_ties(h.x, -cost)
    return ThresholdResult(t, cost, idx)


ALGORITHMS = ("ght", "met", "otsu", "otsu-distortion", "wprctile")


def threshold(h: Histogram, algorithm: str = "ght", params: GhtParams | None = None) -> ThresholdResult:
    """Dispatch by name.  ``params.omega`` is used by ``wprctile``."""
    params = GhtParams() if params is None else params
    if algorithm == "ght":
        return ght(h, params)
    if algorithm == "met":
        return met(h)
    if algorithm == "otsu":
        return otsu(h)
    if algorithm == "otsu-distortion":
        return otsu_distortion_form(h)
    if algorithm == "wprctile":
        return wprctile(h, params.omega)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "CLIP",
    "GhtParams",
    "ThresholdResult",
    "argmax_mean_ties",
    "ght",
    "ght_scores",
    "met",
    "met_scores",
    "otsu",
    "otsu_distortion_form",
    "wprctile",
    "threshold",
    "ALGORITHMS",
    "TUNED_GHT",
    "OTSU_CASE",
    "MET_CASE",
    "WPRCTILE_OMEGA",
    "wprctile_case",
]
