"""Compiled GHT sweep.

The per-split statistics come from one running-sum pass (upper sums are totals
minus prefix, as in ``split_stats``).  Logarithms are taken in a single numpy
call between the two compiled stages because numpy's vectorized log is several
times faster than the scalar libm call numba emits.  Variances are carried as
reciprocals, clamped at ``1 / CLIP``, to save divisions.

Scores agree with ``thresholders.ght_scores`` to rounding; that function is the
fallback when numba is not importable.
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

CLIP = 1e-30
INV_CLIP = 1e30


def _split_terms(n, x, nu, tau):
    # rows: w0, w1, 1/v0, 1/v1, -d0/v0, -d1/v1, then 4 rows left for the logs of rows 0-3
    k = n.shape[0]
    t0 = 0.0
    t1 = 0.0
    t2 = 0.0
    for j in range(k):
        nx = n[j] * x[j]
        t0 += n[j]
        t1 += nx
        t2 += nx * x[j]

    tau2 = tau * tau
    out = np.empty((10, k - 1))
    c0 = 0.0
    c1 = 0.0
    c2 = 0.0
    for i in range(k - 1):
        nx = n[i] * x[i]
        c0 += n[i]
        c1 += nx
        c2 += nx * x[i]
        w0 = max(CLIP, c0)
        w1 = max(CLIP, t0 - c0)
        inv = 1.0 / (w0 + w1)
        p0 = w0 * inv
        p1 = w1 * inv
        mu0 = c1 / w0
        mu1 = (t1 - c1) / w1
        d0 = max(0.0, c2 - w0 * mu0**2)
        d1 = max(0.0, (t2 - c2) - w1 * mu1**2)
        iv0 = min(INV_CLIP, (p0 * nu + w0) / (p0 * nu * tau2 + d0))
        iv1 = min(INV_CLIP, (p1 * nu + w1) / (p1 * nu * tau2 + d1))
        out[0, i] = w0
        out[1, i] = w1
        out[2, i] = iv0
        out[3, i] = iv1
        out[4, i] = -d0 * iv0
        out[5, i] = -d1 * iv1
    return out


def _combine(terms, x, kappa, omega):
    m = terms.shape[1]
    a0 = kappa * omega
    a1 = kappa * (1.0 - omega)
    scores = np.empty(m)
    best = -np.inf
    for i in range(m):
        w0 = terms[0, i]
        w1 = terms[1, i]
        # each side on its own, then one commutative add, so that mirrored
        # splits tie exactly as they do in the reference implementations
        f0 = terms[4, i] + w0 * terms[8, i] + 2 * (w0 + a0) * terms[6, i]
        f1 = terms[5, i] + w1 * terms[9, i] + 2 * (w1 + a1) * terms[7, i]
        s = f0 + f1
        scores[i] = s
        if s > best:
            best = s

    count = 0
    for i in range(m):
        if scores[i] == best:
            count += 1
    idx = np.empty(count, dtype=np.int64)
    total = 0.0
    count = 0
    for i in range(m):
        if scores[i] == best:
            idx[count] = i
            total += x[i]
            count += 1
    return scores, idx, total / count


if njit is not None:
    _split_terms = njit(cache=True, nogil=True, error_model="numpy")(_split_terms)
    _combine = njit(cache=True, nogil=True, error_model="numpy")(_combine)
    HAVE_NUMBA = True
else:  # pragma: no cover
    HAVE_NUMBA = False


def ght_sweep(n, x, nu, tau, kappa, omega):
    """Return ``(scores, argmax_indices, t)``."""
    terms = _split_terms(n, x, nu, tau)
    np.log(terms[:4], out=terms[6:])
    return _combine(terms, x, kappa, omega)
