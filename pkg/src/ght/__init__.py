"""Generalized histogram thresholding (GHT) with Otsu, MET and weighted
percentile as special cases, plus a document binarization pipeline."""
from .histogram import CLIP, Histogram, HistogramError, SplitStats, from_pixels, from_sorted_values, read_csv, split_stats
from .imaging import binarize, read_image, run_binarization, to_gray_max, write_image
from .metrics import EvalReport, aggregate, drd, f1, oracle_global_threshold, psnr
from .thresholders import (
    ALGORITHMS,
    MET_CASE,
    OTSU_CASE,
    TUNED_GHT,
    GhtParams,
    ThresholdResult,
    argmax_mean_ties,
    ght,
    met,
    otsu,
    otsu_distortion_form,
    threshold,
    wprctile,
    wprctile_case,
)

__version__ = "0.1.0"
