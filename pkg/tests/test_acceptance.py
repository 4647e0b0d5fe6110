"""Acceptance criteria, each checked at its stated tolerance.

Every test appends one ``PASS``/``FAIL``/``SKIP`` line to ``REPORT``; the
lines are printed in the pytest terminal summary and by running this file
directly.
"""
import math
import time
import warnings

import numpy as np
import pytest

from ght import _kernel
from ght.cli import main
from ght.corpus import dataset_dirs, evaluate_corpus, evaluate_oracle, load_corpus
from ght.histogram import Histogram, from_pixels, split_stats
from ght.imaging import run_binarization
from ght.oracle import ght_ecll, ght_forloop
from ght.thresholders import (
    OTSU_CASE,
    TUNED_GHT,
    WPRCTILE_OMEGA,
    GhtParams,
    ght,
    met,
    otsu,
    wprctile,
    wprctile_case,
)
from support import (
    blur_histogram,
    gap_histogram,
    image_like_histogram,
    random_histogram,
    random_params,
    trimodal_histogram,
)

REPORT = []


def report(criterion, ok, detail):
    REPORT.append(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    return ok


def test_1_special_case_equivalence():
    rng = np.random.default_rng(1001)
    cases = [random_histogram(rng) for _ in range(1000)]
    omegas = rng.random((1000, 10))
    miss = {"met": 0, "otsu": 0, "wprctile": 0}
    t0 = time.perf_counter()
    for h, ws in zip(cases, omegas):
        nu_free = float(2.0 ** rng.uniform(-5, 6))
        miss["met"] += ght(h, GhtParams(0, nu_free, 0, float(ws[0]))).t != met(h).t
        miss["otsu"] += ght(h, OTSU_CASE).t != otsu(h).t
        for w in ws:
            miss["wprctile"] += ght(h, wprctile_case(float(w))).t != wprctile(h, float(w)).t
    elapsed = time.perf_counter() - t0
    ok = sum(miss.values()) == 0 and elapsed < 10
    report(1, ok, f"mismatches {miss} over 1000 histograms (10 omegas each), {elapsed:.2f} s")
    assert sum(miss.values()) == 0
    assert elapsed < 10


def test_2_oracle_equivalence():
    rng = np.random.default_rng(1002)
    disagree = 0
    worst = 0.0
    for _ in range(500):
        h = random_histogram(rng, k_max=64)
        p = random_params(rng)
        t = ght(h, p).t
        disagree += (ght_forloop(h, p).t != t) or (ght_ecll(h, p).t != t)

        s = split_stats(h)
        ok = (s.d0 / s.w0 > 1e-30) & (s.d1 / s.w1 > 1e-30) & (s.w0 > 1e-30) & (s.w1 > 1e-30)
        f = ght(h, GhtParams(0, p.tau, 0, p.omega)).scores[ok]
        ell = met(h).scores[ok]
        if f.size:
            rhs = 1 - h.total - ell
            worst = max(worst, float(np.max(np.abs(f - rhs) / np.maximum(np.abs(rhs), 1.0))))
    ok = disagree == 0 and worst <= 1e-6
    report(2, ok, f"{disagree}/500 three-way disagreements, affine relation max rel err {worst:.1e}")
    assert disagree == 0
    assert worst <= 1e-6


def test_3_invariances():
    rng = np.random.default_rng(1003)
    scale_miss = affine_miss = 0
    for _ in range(500):
        h = random_histogram(rng)
        p = random_params(rng, allow_zero=False)
        a, b = 10 ** rng.uniform(-3, 3), rng.uniform(-1e3, 1e3)
        t = ght(h, p).t
        scaled = ght(Histogram(h.x, a * h.n), GhtParams(a * p.nu, p.tau, a * p.kappa, p.omega)).t
        scale_miss += scaled != t
        moved = ght(Histogram(a * h.x + b, h.n), GhtParams(p.nu, a * p.tau, p.kappa, p.omega)).t
        expected = a * t + b
        affine_miss += not math.isclose(moved, expected, rel_tol=1e-9, abs_tol=1e-9 * max(1.0, abs(b)))
    ok = scale_miss == 0 and affine_miss == 0
    report(3, ok, f"count-scaling misses {scale_miss}/500, affine-bin misses {affine_miss}/500")
    assert scale_miss == 0
    assert affine_miss == 0


def test_4_blur_equivalence():
    eps = 1e-6
    rates = {}
    for sigma in (1, 2, 4):
        rng = np.random.default_rng(1004 + sigma)
        agree = 0
        for _ in range(500):
            h = image_like_histogram(rng)
            blurred = met(blur_histogram(h, sigma)).t
            p = GhtParams(h.total * eps, sigma / math.sqrt(eps), 0, 0.5)
            agree += blurred == ght(h, p).t
        rates[sigma] = agree / 500
    ok = all(r >= 0.9 for r in rates.values())
    detail = ", ".join(f"sigma={s}: {100 * r:.1f}%" for s, r in rates.items())
    report(4, ok, f"agreement {detail} (need >= 90% each)")
    assert ok


HDIBCO_TARGETS = {
    "otsu f1": (87.19, 0.05),
    "otsu psnr": (17.97, 0.02),
    "ght f1": (88.77, 0.3),
    "ght psnr": (18.55, 0.15),
    "ght drd": (3.99, 0.5),
    "met f1": (60.40, 1.0),
    "wprctile f1": (76.77, 1.0),
    "oracle f1": (90.69, 0.2),
}


def test_5_hdibco2016_reproduction():
    images, gts = dataset_dirs("hdibco2016")
    if not (images.is_dir() and gts.is_dir()):
        msg = f"H-DIBCO 2016 data not found under {images.parent}; run scripts/fetch_hdibco.py"
        REPORT.append(f"SKIP criterion 5: {msg}")
        warnings.warn(msg)
        pytest.skip(msg)
    t0 = time.perf_counter()
    samples = load_corpus(images, gts)
    reports = {
        "otsu": evaluate_corpus(samples, "otsu"),
        "ght": evaluate_corpus(samples, "ght", TUNED_GHT),
        "met": evaluate_corpus(samples, "met"),
        "wprctile": evaluate_corpus(samples, "ght", wprctile_case(WPRCTILE_OMEGA)),
        "oracle": evaluate_oracle(samples),
    }
    elapsed = time.perf_counter() - t0
    got, bad = {}, []
    for key, (target, tol) in HDIBCO_TARGETS.items():
        name, metric = key.split()
        got[key] = reports[name].mean(metric)
        if abs(got[key] - target) > tol:
            bad.append(key)
    ok = not bad and elapsed < 60 and len(samples) == 10
    detail = ", ".join(f"{k} {v:.2f}" for k, v in got.items())
    report(5, ok, f"{len(samples)} images in {elapsed:.1f} s; {detail}; out of tolerance: {bad or 'none'}")
    assert len(samples) == 10
    assert not bad
    assert elapsed < 60


def _run_sweep(path, *flags):
    out = path.with_suffix(".sweep.csv")
    assert main(["sweep", str(path), *flags, "-o", str(out)]) == 0
    return np.loadtxt(out, delimiter=",", skiprows=1, ndmin=2)


def test_6_figure_sweeps(tmp_path):
    h, (lo, hi) = gap_histogram()
    gap_csv = tmp_path / "gap.csv"
    h.to_csv(gap_csv)
    rows = _run_sweep(gap_csv, "--param", "nu", "--min", "-2", "--max", "12", "--count", "113", "--tau", "0.01", "--kappa", "0")
    log_nu, ts = rows[:, 1], rows[:, 2]
    inside = (ts >= lo) & (ts < hi)
    best = run = 0
    start = end = 0
    for i, f in enumerate(inside):
        run = run + 1 if f else 0
        if run > best:
            best, end = run, i
            start = i - run + 1
    octaves = log_nu[end] - log_nu[start] if best else 0.0
    ends_ok = ts[0] == met(h).t and ts[-1] == otsu(h).t

    tri_csv = tmp_path / "tri.csv"
    trimodal_histogram().to_csv(tri_csv)
    rows = _run_sweep(
        tri_csv, "--param", "omega", "--min", "0.005", "--max", "0.995", "--count", "100",
        "--nu", "200", "--tau", "0.01", "--kappa", "0.1",
    )
    w, tw = rows[:, 0], rows[:, 1]
    below, above = np.unique(tw[w < 0.5]), np.unique(tw[w > 0.5])
    step_ok = len(below) == 1 and len(above) == 1 and below[0] != above[0]

    ok = octaves >= 4 and ends_ok and step_ok
    report(
        6,
        ok,
        f"gap plateau {octaves:.2f} octaves (log2 nu {log_nu[start]:.3f}..{log_nu[end]:.3f}), "
        f"ends match MET/Otsu: {ends_ok}; omega levels {below.tolist()} / {above.tolist()} around 1/2",
    )
    assert octaves >= 4
    assert ends_ok
    assert step_ok


def test_7_performance():
    rng = np.random.default_rng(1007)
    h = from_pixels(rng.integers(0, 256, 100_000).astype(np.uint8))
    ght(h, TUNED_GHT)
    reps = 2000
    per_call = min(_timed(lambda: ght(h, TUNED_GHT), reps) for _ in range(7))

    image = rng.integers(0, 256, (2500, 4000, 3), dtype=np.uint8)  # 10 MP RGB
    run_binarization(image, "ght", TUNED_GHT)
    pipeline = min(_timed(lambda: run_binarization(image, "ght", TUNED_GHT), 1) for _ in range(5))

    # machine speed reference: one vectorized log over 255 values
    probe = rng.random(255) + 1
    log_ref = min(_timed(lambda: np.log(probe), reps) for _ in range(7))

    ok = per_call < 10e-6 and pipeline < 0.2
    engine = "compiled" if _kernel.HAVE_NUMBA else "numpy"
    report(
        7,
        ok,
        f"256-bin GHT {per_call * 1e6:.2f} us ({engine}; np.log of 255 values {log_ref * 1e6:.2f} us), "
        f"10 MP pipeline {pipeline * 1e3:.0f} ms",
    )
    assert per_call < 10e-6
    assert pipeline < 0.2


def _timed(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for fn in tests:
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except (AssertionError, pytest.skip.Exception):
            pass
    print("\n".join(REPORT))
    sys.exit(0 if all(line.startswith(("PASS", "SKIP")) for line in REPORT) else 1)
