"""Image I/O, grayscale reduction and global-threshold binarization.

Grayscale images are 2-d ``uint8`` arrays.  Binary images are 2-d ``bool``
arrays where ``True`` marks ink (foreground).  On disk, ink is black (0) and
background white (255), the convention of DIBCO ground truth.

Binary PGM/PPM (P5/P6, maxval 255) is read and written without third-party
code; everything else goes through Pillow.
"""
from __future__ import annotations

import os
import re

import numpy as np

from .histogram import from_pixels
from .thresholders import GhtParams, ThresholdResult, threshold


class ImageFormatError(ValueError):
    pass


_NETPBM_EXT = {".pgm", ".ppm", ".pnm"}
_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def _read_netpbm(path):
    with open(path, "rb") as f:
        data = f.read()
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ImageFormatError(f"{path}: truncated netpbm header")
        fields.append(m.group(1))
        pos = m.end()
    magic, width, height, maxval = fields[0], *(int(v) for v in fields[1:])
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"{path}: only binary P5/P6 netpbm is supported, got {magic.decode()}")
    if maxval > 255:
        raise ImageFormatError(f"{path}: unsupported bit depth (maxval {maxval}); only 8-bit images are supported")
    pos += 1  # single whitespace byte after maxval
    channels = 1 if magic == b"P5" else 3
    size = width * height * channels
    raster = np.frombuffer(data, dtype=np.uint8, count=size, offset=pos) if len(data) - pos >= size else None
    if raster is None:
        raise ImageFormatError(f"{path}: truncated raster")
    shape = (height, width) if channels == 1 else (height, width, 3)
    return raster.reshape(shape).copy()


def _write_netpbm(path, arr):
    if arr.ndim == 2:
        magic = b"P5"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        magic = b"P6"
    else:
        raise ImageFormatError("netpbm output needs a gray or RGB image")
    h, w = arr.shape[:2]
    with open(path, "wb") as f:
        f.write(b"%s\n%d %d\n255\n" % (magic, w, h))
        f.write(np.ascontiguousarray(arr, dtype=np.uint8).tobytes())


def read_image(path) -> np.ndarray:
    """Read an 8-bit image as ``(H, W)`` or ``(H, W, C)`` uint8."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if os.path.splitext(path)[1].lower() in _NETPBM_EXT:
        return _read_netpbm(path)

    from PIL import Image

    with Image.open(path) as im:
        if im.mode == "1":
            im = im.convert("L")
        elif im.mode == "P":
            im = im.convert("RGBA" if "transparency" in im.info else "RGB")
        elif im.mode not in ("L", "LA", "RGB", "RGBA"):
            raise ImageFormatError(f"{path}: unsupported bit depth or mode {im.mode!r}; only 8-bit images are supported")
        return np.asarray(im, dtype=np.uint8).copy()


def write_image(path, arr) -> None:
    """Write a uint8 gray/RGB image, or a bool ink mask (ink black)."""
    path = os.fspath(path)
    arr = np.asarray(arr)
    if arr.dtype == bool:
        arr = encode_binary(arr)
    if arr.dtype != np.uint8:
        raise ImageFormatError(f"expected uint8 or bool image, got {arr.dtype}")
    if os.path.splitext(path)[1].lower() in _NETPBM_EXT:
        _write_netpbm(path, arr)
        return

    from PIL import Image

    Image.fromarray(arr).save(path)


def to_gray_max(img) -> np.ndarray:
    """Per-pixel maximum over color channels; alpha is ignored."""
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ImageFormatError(f"unsupported bit depth ({img.dtype}); only 8-bit images are supported")
    if img.ndim == 2:
        return img
    if img.ndim != 3:
        raise ImageFormatError(f"expected a 2-d or 3-d image, got shape {img.shape}")
    c = img.shape[2]
    if c in (1, 2):  # gray, gray + alpha
        return img[:, :, 0]
    if c in (3, 4):
        return np.maximum(np.maximum(img[:, :, 0], img[:, :, 1]), img[:, :, 2])
    raise ImageFormatError(f"unsupported channel count {c}")


def binarize(gray, t: float) -> np.ndarray:
    """Ink mask: pixels at or below ``t`` are ink, those above it background."""
    return np.asarray(gray) <= t


def encode_binary(mask) -> np.ndarray:
    return np.where(mask, np.uint8(0), np.uint8(255))


def decode_binary(img) -> np.ndarray:
    """Ink mask from a stored binary image (dark pixels are ink)."""
    return to_gray_max(img) < 128


def run_binarization(
    image, algorithm: str = "ght", params: GhtParams | None = None
) -> tuple[np.ndarray, ThresholdResult]:
    """Gray by channel max, 256-bin histogram, global threshold, binarize."""
    gray = to_gray_max(image)
    result = threshold(from_pixels(gray), algorithm, params)
    return binarize(gray, result.t), result


def diff_mask(pred, gt) -> np.ndarray:
    """RGB visualization: false positives red, false negatives blue, agreement black or white."""
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    out = np.full(pred.shape + (3,), 255, dtype=np.uint8)
    out[pred & gt] = 0
    out[pred & ~gt] = (255, 0, 0)
    out[~pred & gt] = (0, 0, 255)
    return out
