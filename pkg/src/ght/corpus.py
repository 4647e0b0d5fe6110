"""Pairing images with ground truth on disk, and batch evaluation."""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imaging import decode_binary, read_image, run_binarization, to_gray_max
from .metrics import EvalReport, aggregate, evaluate_image, oracle_global_threshold
from .thresholders import GhtParams

IMAGE_EXTS = {".png", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg", ".pgm", ".ppm", ".pnm"}
GT_SUFFIXES = ("_gt", "-gt", "_GT", ".gt")
DATA_ENV = "GHT_DATA_DIR"


class CorpusError(ValueError):
    pass


@dataclass
class Sample:
    image_id: str
    gray: np.ndarray
    gt: np.ndarray


def stem_key(path) -> str:
    """Filename stem with any ground-truth suffix removed."""
    stem = Path(path).stem
    for suf in GT_SUFFIXES:
        if stem.endswith(suf):
            return stem[: -len(suf)]
    return stem


def list_images(directory) -> dict[str, Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    out = {}
    for p in sorted(directory.iterdir()):
        if p.is_file() and p.suffix.lower() in IMAGE_EXTS:
            key = stem_key(p)
            if key in out:
                raise CorpusError(f"two files map to id {key!r}: {out[key].name}, {p.name}")
            out[key] = p
    return out


def match_pairs(left_dir, right_dir, allow_missing: bool = False) -> list[tuple[str, Path, Path]]:
    """Pair files of two directories by stem.  Unmatched files raise unless
    ``allow_missing``, in which case they are dropped."""
    left, right = list_images(left_dir), list_images(right_dir)
    if not left:
        raise CorpusError(f"no images in {left_dir}")
    if not right:
        raise CorpusError(f"no images in {right_dir}")
    missing = sorted(set(left) ^ set(right))
    if missing and not allow_missing:
        raise CorpusError("unmatched files: " + ", ".join(missing))
    common = sorted(set(left) & set(right))
    if not common:
        raise CorpusError("no matching image / ground-truth pairs")
    return [(k, left[k], right[k]) for k in common]


def load_corpus(image_dir, gt_dir, allow_missing: bool = False) -> list[Sample]:
    samples = []
    for key, img_path, gt_path in match_pairs(image_dir, gt_dir, allow_missing):
        gray = to_gray_max(read_image(img_path))
        gt = decode_binary(read_image(gt_path))
        if gray.shape != gt.shape:
            raise CorpusError(f"{key}: image {gray.shape} and ground truth {gt.shape} differ in size")
        samples.append(Sample(key, gray, gt))
    return samples


def default_data_dir() -> Path:
    """``$GHT_DATA_DIR`` if set, else ``data/`` next to the working directory."""
    return Path(os.environ.get(DATA_ENV, "data"))


def dataset_dirs(name: str, root=None) -> tuple[Path, Path]:
    root = default_data_dir() if root is None else Path(root)
    return root / name / "images", root / name / "gt"


def evaluate_corpus(samples, algorithm: str = "ght", params: GhtParams | None = None) -> EvalReport:
    records = []
    for s in samples:
        mask, res = run_binarization(s.gray, algorithm, params)
        records.append(evaluate_image(s.image_id, mask, s.gt, res.t))
    return aggregate(records)


def evaluate_oracle(samples) -> EvalReport:
    records = []
    for s in samples:
        t, _ = oracle_global_threshold(s.gray, s.gt)
        records.append(evaluate_image(s.image_id, s.gray <= t, s.gt, float(t)))
    return aggregate(records)
