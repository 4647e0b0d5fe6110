"""Slow reference implementations of GHT used to check the vectorized one.

``ght_forloop`` walks the histogram once with running sums, the way Otsu's
method and MET are usually written.  ``ght_ecll`` scores every split by
evaluating the expected complete log-likelihood directly from Normal and Beta
log-densities, recomputing every sum from scratch.  Neither touches
``split_stats`` or ``ght_scores``.

All sums in ``ght_ecll`` use ``math.fsum`` so that splits differing only by
empty bins produce bit-identical scores, as they do in the cumulative form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .histogram import CLIP, Histogram
from .thresholders import GhtParams, ThresholdResult

LOG_2PI = math.log(2.0 * math.pi)
# Upper clamp on the mixture fraction fed to the Beta density.
P_MAX = 1.0 - 1e-15


def _clip(z: float) -> float:
    return z if z > CLIP else CLIP


def ght_forloop(h: Histogram, p: GhtParams) -> ThresholdResult:
    n = h.n.tolist()
    x = h.x.tolist()
    nu, tau, kappa, omega = p.nu, p.tau, p.kappa, p.omega

    n_sum = float(np.sum(h.n))
    nx_sum = float(np.sum(h.n * h.x))
    nxx_sum = float(np.sum(h.n * h.x**2))

    scores = []
    max_score, t_numer, t_denom, ties = -math.inf, 0.0, 0, []
    n_c = nx_c = nxx_c = 0.0
    for i in range(len(n) - 1):
        n_c += n[i]
        nx_c += n[i] * x[i]
        nxx_c += n[i] * x[i] ** 2
        w0 = _clip(n_c)
        w1 = _clip(n_sum - n_c)
        p0 = w0 / n_sum
        p1 = w1 / n_sum
        d0 = max(0.0, nxx_c - nx_c**2 / w0)
        d1 = max(0.0, (nxx_sum - nxx_c) - (nx_sum - nx_c) ** 2 / w1)
        v0 = _clip((p0 * nu * tau**2 + d0) / (p0 * nu + w0))
        v1 = _clip((p1 * nu * tau**2 + d1) / (p1 * nu + w1))
        f0 = -d0 / v0 - w0 * math.log(v0) + 2 * (w0 + kappa * omega) * math.log(w0)
        f1 = -d1 / v1 - w1 * math.log(v1) + 2 * (w1 + kappa * (1 - omega)) * math.log(w1)
        score = f0 + f1
        scores.append(score)

        if score > max_score:
            max_score, t_numer, t_denom, ties = score, 0.0, 0, []
        if score == max_score:
            t_numer += x[i]
            t_denom += 1
            ties.append(i)
    return ThresholdResult(t_numer / t_denom, np.array(scores), np.array(ties))


def sichi2_posterior_variance(counts, residuals, nu_scaled: float, tau: float) -> float:
    """Posterior variance under a scaled inverse chi-squared prior.

    ``(nu' tau^2 + sum(n r^2)) / (nu' + sum(n))``, with the denominator kept
    away from zero so an empty side with no prior still yields a number.
    """
    if nu_scaled < 0 or tau < 0:
        raise ValueError("nu_scaled and tau must be nonnegative")
    counts = np.asarray(counts, dtype=np.float64)
    residuals = np.asarray(residuals, dtype=np.float64)
    num = nu_scaled * tau**2 + math.fsum(counts * residuals**2)
    den = _clip(nu_scaled + math.fsum(counts))
    return num / den


def normal_logpdf(x, mu: float, var: float):
    x = np.asarray(x, dtype=np.float64)
    return -0.5 * (LOG_2PI + math.log(var)) - (x - mu) ** 2 / (2.0 * var)


def log_beta_fn(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_logpdf(p: float, a: float, b: float, q: float | None = None) -> float:
    """Beta(a, b) log-density at ``p``.  ``q`` is ``1 - p`` when known more
    accurately than the subtraction would give."""
    q = 1.0 - p if q is None else q
    return (a - 1.0) * math.log(p) + (b - 1.0) * math.log(q) - log_beta_fn(a, b)


@dataclass(frozen=True, eq=False)
class EcllTerms:
    """Per-split fitted mixture parameters and log-likelihood."""

    w0: np.ndarray
    w1: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    mu0: np.ndarray
    mu1: np.ndarray
    var0: np.ndarray
    var1: np.ndarray
    ll: np.ndarray


def ecll_terms(h: Histogram, p: GhtParams) -> EcllTerms:
    n, x = h.n, h.x
    n_sum = math.fsum(n)
    rows = []
    for i in range(len(n) - 1):
        n0, n1 = n[: i + 1], n[i + 1 :]
        x0, x1 = x[: i + 1], x[i + 1 :]
        w0 = _clip(math.fsum(n0))
        w1 = _clip(math.fsum(n1))
        p0 = w0 / n_sum
        p1 = w1 / n_sum
        mu0 = math.fsum(n0 * x0) / w0
        mu1 = math.fsum(n1 * x1) / w1
        var0 = _clip(sichi2_posterior_variance(n0, x0 - mu0, p0 * p.nu, p.tau))
        var1 = _clip(sichi2_posterior_variance(n1, x1 - mu1, p1 * p.nu, p.tau))
        side0 = math.fsum(n0 * (math.log(p0) + normal_logpdf(x0, mu0, var0)))
        side1 = math.fsum(n1 * (math.log(p1) + normal_logpdf(x1, mu1, var1)))
        prior = beta_logpdf(min(p0, P_MAX), p.alpha, p.beta, q=p1)
        rows.append((w0, w1, p0, p1, mu0, mu1, var0, var1, side0 + side1 + prior))
    cols = np.array(rows).T
    return EcllTerms(*cols)


def ght_ecll(h: Histogram, p: GhtParams) -> ThresholdResult:
    ll = ecll_terms(h, p).ll
    best = np.max(ll)
    idx = np.flatnonzero(ll == best)
    return ThresholdResult(float(np.mean(h.x[:-1][idx])), ll, idx)
