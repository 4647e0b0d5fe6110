"""Random inputs and helpers shared by the test modules."""
import math

import numpy as np

from ght.histogram import Histogram
from ght.thresholders import GhtParams


def random_histogram(rng, k_max=256, k_min=2):
    """Integer counts from a mixture of 1-3 point masses, uniforms and
    Gaussians, binned on ``x = 0..K-1``.  Zero bins are common."""
    k = int(rng.integers(k_min, k_max + 1))
    total = int(rng.integers(1, 5000))
    parts = []
    for _ in range(int(rng.integers(1, 4))):
        kind = rng.integers(3)
        size = max(1, int(total * rng.random()))
        if kind == 0:
            parts.append(np.full(size, rng.integers(k)))
        elif kind == 1:
            a, b = sorted(rng.integers(0, k, 2))
            parts.append(rng.integers(a, b + 1, size))
        else:
            mu, sd = rng.uniform(0, k), rng.uniform(0.3, k / 3 + 0.5)
            parts.append(np.clip(np.round(rng.normal(mu, sd, size)), 0, k - 1).astype(int))
    n = np.bincount(np.concatenate(parts), minlength=k).astype(np.float64)
    return Histogram(np.arange(k, dtype=np.float64), n)


def random_params(rng, allow_zero=True):
    """Hyperparameters spread over many octaves; nu and kappa are sometimes 0."""
    nu = 0.0 if allow_zero and rng.random() < 0.2 else 2.0 ** rng.uniform(-5, 25)
    tau = 2.0 ** rng.uniform(-5, 6)
    kappa = 0.0 if allow_zero and rng.random() < 0.2 else 2.0 ** rng.uniform(-5, 20)
    return GhtParams(nu, tau, kappa, float(rng.random()))


def gaussian_kernel(sigma, truncate=4.0):
    r = int(math.ceil(truncate * sigma))
    k = np.arange(-r, r + 1, dtype=np.float64)
    f = np.exp(-0.5 * (k / sigma) ** 2)
    return f / f.sum(), r


def blur_histogram(h, sigma):
    """Full convolution of the counts with a normalized Gaussian, zero
    boundaries, with unit-spaced bins extended by the kernel radius."""
    f, r = gaussian_kernel(sigma)
    n = np.convolve(h.n, f, mode="full")
    x = np.arange(h.x[0] - r, h.x[-1] + r + 1, dtype=np.float64)
    return Histogram(x, n)


def image_like_histogram(rng, k=256, sd_range=(8.0, 40.0)):
    """256-bin histogram of a 2-3 component Gaussian mixture of pixel values."""
    parts = []
    for _ in range(int(rng.integers(2, 4))):
        size = int(rng.integers(1000, 100000))
        parts.append(np.round(rng.normal(rng.uniform(0, k), rng.uniform(*sd_range), size)))
    s = np.clip(np.concatenate(parts), 0, k - 1).astype(int)
    return Histogram(np.arange(k, dtype=np.float64), np.bincount(s, minlength=k).astype(np.float64))


def gap_histogram():
    """Small uniform mode, empty gap, large uniform mode, on a 1/128 grid."""
    n = np.zeros(32)
    n[1:6] = 1.0
    n[13:32] = 5.0
    return Histogram(np.arange(32) / 128.0, n), (5 / 128.0, 13 / 128.0)


def trimodal_histogram():
    """Three identical flat modes placed symmetrically on ``x = 0..63``."""
    n = np.zeros(64)
    for a in (4, 28, 52):
        n[a : a + 8] = 10.0
    return Histogram(np.arange(64, dtype=np.float64), n)


def two_tone_image(shape=(40, 60), lo=50, hi=200):
    img = np.full(shape, hi, dtype=np.uint8)
    img[:, : shape[1] // 2] = lo
    return img


def synthetic_page(rng, shape=(160, 240)):
    """Dark strokes on bright paper that partly saturates at 255; returns
    (gray, ink mask)."""
    gt = np.zeros(shape, dtype=bool)
    for row in range(20, shape[0] - 20, 24):
        for col in range(16, shape[1] - 24, 20):
            if rng.random() < 0.7:
                gt[row : row + 10, col : col + 3] = True
                gt[row + 8 : row + 10, col : col + 10] = True
    paper = rng.normal(240, 14, shape)
    ink = rng.normal(60, 20, shape)
    gray = np.clip(np.round(np.where(gt, ink, paper)), 0, 255).astype(np.uint8)
    return gray, gt
