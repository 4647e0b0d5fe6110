"""DIBCO binarization metrics: F-measure, PSNR and DRD, plus aggregation.

All metrics take ink masks (``True`` = text) with the prediction first.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

DRD_BLOCK = 8
DRD_RADIUS = 2


class MetricError(ValueError):
    pass


def _check(pred, gt):
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise MetricError(f"dimension mismatch: prediction {pred.shape} vs ground truth {gt.shape}")
    return pred, gt


def f1(pred, gt) -> float:
    """F-measure of the ink class, times 100."""
    pred, gt = _check(pred, gt)
    tp = np.count_nonzero(pred & gt)
    fp = np.count_nonzero(pred & ~gt)
    fn = np.count_nonzero(~pred & gt)
    if tp + fp + fn == 0:
        return 100.0
    return 100.0 * 2 * tp / (2 * tp + fp + fn)


def psnr(pred, gt) -> float:
    """``10 log10(1 / MSE)`` on {0, 1} images; ``inf`` when identical."""
    pred, gt = _check(pred, gt)
    mse = np.count_nonzero(pred != gt) / pred.size
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def drd_weights(radius: int = DRD_RADIUS) -> np.ndarray:
    """Reciprocal-distance weights with zero center, normalized to sum 1."""
    r = np.arange(-radius, radius + 1)
    dist = np.hypot(r[:, None], r[None, :])
    w = np.zeros_like(dist)
    np.divide(1.0, dist, out=w, where=dist > 0)
    return w / w.sum()


def nubn(gt, block: int = DRD_BLOCK) -> int:
    """Number of complete ``block x block`` ground-truth blocks holding both classes."""
    gt = np.asarray(gt, dtype=bool)
    h, w = (gt.shape[0] // block) * block, (gt.shape[1] // block) * block
    blocks = gt[:h, :w].reshape(h // block, block, w // block, block)
    ink = blocks.sum(axis=(1, 3))
    return int(np.count_nonzero((ink > 0) & (ink < block * block)))


def drd(pred, gt) -> float:
    """Distance-reciprocal distortion.

    Each flipped pixel costs the weighted count of ground-truth neighbors in
    its 5x5 window that disagree with its predicted value; neighbors outside
    the image cost nothing.  The total is divided by :func:`nubn`.
    """
    pred, gt = _check(pred, gt)
    blocks = nubn(gt)
    if blocks == 0:
        raise MetricError("uniform ground truth (no non-uniform 8x8 blocks)")
    flipped = pred != gt
    if not flipped.any():
        return 0.0
    w = drd_weights()
    g = gt.astype(np.float64)
    # weighted count of ink / background neighbors for every pixel
    ink_nb = ndimage.correlate(g, w, mode="constant", cval=0.0)
    bg_nb = ndimage.correlate(1.0 - g, w, mode="constant", cval=0.0)
    # a pixel predicted as ink disagrees with background neighbors, and vice versa
    cost = np.where(pred, bg_nb, ink_nb)
    return float(cost[flipped].sum() / blocks)


def f1_by_threshold(gray, gt) -> np.ndarray:
    """F1 (x100) of ``gray <= t`` for every integer ``t`` in 0..255."""
    gray = np.asarray(gray)
    gt = np.asarray(gt, dtype=bool)
    if gray.shape != gt.shape:
        raise MetricError(f"dimension mismatch: image {gray.shape} vs ground truth {gt.shape}")
    ink_hist = np.bincount(gray[gt].ravel(), minlength=256)[:256]
    bg_hist = np.bincount(gray[~gt].ravel(), minlength=256)[:256]
    tp = np.cumsum(ink_hist)
    fp = np.cumsum(bg_hist)
    fn = ink_hist.sum() - tp
    den = 2 * tp + fp + fn
    return np.where(den > 0, 100.0 * 2 * tp / np.maximum(den, 1), 100.0)


def oracle_global_threshold(gray, gt) -> tuple[int, float]:
    """The single threshold maximizing F1 for this image (lowest on ties)."""
    scores = f1_by_threshold(gray, gt)
    t = int(np.argmax(scores))
    return t, float(scores[t])


@dataclass
class ImageRecord:
    image_id: str
    f1: float
    psnr: float
    drd: float
    threshold: float | None = None


def evaluate_image(image_id, pred, gt, threshold=None) -> ImageRecord:
    return ImageRecord(str(image_id), f1(pred, gt), psnr(pred, gt), drd(pred, gt), threshold)


METRICS = ("f1", "psnr", "drd")


@dataclass
class EvalReport:
    records: list[ImageRecord]
    aggregates: dict[str, tuple[float, float]] = field(default_factory=dict)

    def mean(self, metric: str) -> float:
        return self.aggregates[metric][0]

    def std(self, metric: str) -> float:
        return self.aggregates[metric][1]

    def to_dict(self) -> dict:
        return {
            "images": [
                {k: _json_num(v) for k, v in vars(r).items() if not (k == "threshold" and v is None)}
                for r in self.records
            ],
            "aggregate": {m: {"mean": _json_num(mu), "std": _json_num(sd)} for m, (mu, sd) in self.aggregates.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        with_t = any(r.threshold is not None for r in self.records)
        cols = ["image_id", *METRICS] + (["threshold"] if with_t else [])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in self.records:
            row = [r.image_id, *(f"{getattr(r, m):.6f}" for m in METRICS)]
            if with_t:
                row.append("" if r.threshold is None else f"{r.threshold:.6f}")
            writer.writerow(row)
        return buf.getvalue()

    def table_row(self, name: str = "") -> str:
        """One line in the ``mean ± std`` style of published result tables."""
        cells = [f"{self.mean(m):.2f} ± {self.std(m):.2f}" for m in METRICS]
        return " | ".join([name, *cells]) if name else " | ".join(cells)


def _json_num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def aggregate(records) -> EvalReport:
    """Mean and sample standard deviation (n - 1) of each metric.

    The std is NaN when a column holds infinities.
    """
    records = list(records)
    if not records:
        raise MetricError("no records to aggregate")
    agg = {}
    for m in METRICS:
        vals = np.array([getattr(r, m) for r in records], dtype=np.float64)
        mean = float(np.mean(vals))
        if len(vals) == 1:
            std = 0.0
        elif np.isfinite(vals).all():
            std = float(np.std(vals, ddof=1))
        else:
            std = math.nan  # e.g. a perfect image with infinite PSNR
        agg[m] = (mean, std)
    return EvalReport(records, agg)
