"""Command-line interface: ``ght threshold|binarize|eval|sweep|tune``.

Exit status is 0 on success, 1 when a computation fails and 2 for usage or
I/O errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import corpus, histogram, imaging, metrics, sweeps, thresholders, tuner
from .thresholders import ALGORITHMS, GhtParams

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2

PRESETS = {
    "met": thresholders.MET_CASE,
    "otsu": thresholders.OTSU_CASE,
    "wprctile": thresholders.wprctile_case(thresholders.WPRCTILE_OMEGA),
    "tuned": thresholders.TUNED_GHT,
}

# errors caused by bad input files or flags rather than by the computation
INPUT_ERRORS = (
    OSError,
    histogram.HistogramError,
    imaging.ImageFormatError,
    corpus.CorpusError,
    sweeps.SweepError,
    tuner.TuneError,
)


class UsageError(Exception):
    pass


def _add_param_flags(p):
    g = p.add_argument_group("GHT hyperparameters (raw value or base-2 exponent)")
    g.add_argument("--preset", choices=sorted(PRESETS), help="start from a named parameter set")
    for name in ("nu", "tau", "kappa", "omega"):
        m = g.add_mutually_exclusive_group()
        m.add_argument(f"--{name}", type=float, metavar="V")
        m.add_argument(f"--{name}-log2", type=float, metavar="E", dest=f"{name}_log2")


def params_from_args(args) -> GhtParams:
    base = PRESETS[args.preset] if getattr(args, "preset", None) else GhtParams()
    updates = {}
    for name in ("nu", "tau", "kappa", "omega"):
        raw, exp = getattr(args, name, None), getattr(args, f"{name}_log2", None)
        if raw is not None:
            updates[name] = raw
        elif exp is not None:
            updates[name] = 2.0**exp
    try:
        return replace(base, **updates)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _add_algorithm(p, default="ght"):
    p.add_argument("-a", "--algorithm", choices=ALGORITHMS, default=default)


def _write_text(path, text):
    Path(path).write_text(text)


def cmd_threshold(args):
    h = histogram.read_csv(args.histogram)
    res = thresholders.threshold(h, args.algorithm, params_from_args(args))
    print(f"{res.t:.6f}")
    if args.scores:
        lines = ["x,score"] + [f"{float(x)!r},{float(s)!r}" for x, s in zip(h.x[:-1], res.scores)]
        _write_text(args.scores, "\n".join(lines) + "\n")
    return EXIT_OK


def _binarize_one(src, dst, args, params, gt_path=None, diff_path=None):
    gray = imaging.to_gray_max(imaging.read_image(src))
    if gray.min() == gray.max():
        print(f"warning: {src}: degenerate histogram (single intensity)", file=sys.stderr)
    mask, res = imaging.run_binarization(gray, args.algorithm, params)
    imaging.write_image(dst, mask)
    line = f"{res.t:.6f}"
    if gt_path is not None:
        gt = imaging.decode_binary(imaging.read_image(gt_path))
        rec = metrics.evaluate_image(Path(src).stem, mask, gt, res.t)
        line += f"\tf1={rec.f1:.4f}\tpsnr={rec.psnr:.4f}\tdrd={rec.drd:.4f}"
        if diff_path is not None:
            imaging.write_image(diff_path, imaging.diff_mask(mask, gt))
    return line


def cmd_binarize(args):
    params = params_from_args(args)
    src = Path(args.input)
    if args.diff and not args.gt:
        raise UsageError("--diff requires --gt")
    if not src.is_dir():
        print(_binarize_one(src, args.output, args, params, args.gt, args.diff))
        return EXIT_OK

    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    gts = corpus.list_images(args.gt) if args.gt else {}
    if args.diff:
        Path(args.diff).mkdir(parents=True, exist_ok=True)
    images = corpus.list_images(src)
    if not images:
        raise corpus.CorpusError(f"no images in {src}")
    for key, path in images.items():
        if args.gt and key not in gts:
            raise corpus.CorpusError(f"no ground truth for {path.name}")
        gt = gts.get(key)
        diff = Path(args.diff) / f"{key}.png" if args.diff else None
        line = _binarize_one(path, out_dir / f"{key}.png", args, params, gt, diff)
        print(f"{key}\t{line}")
    return EXIT_OK


def cmd_eval(args):
    pairs = corpus.match_pairs(args.pred, args.gt, allow_missing=args.allow_missing)
    records = []
    for key, pred_path, gt_path in pairs:
        pred = imaging.decode_binary(imaging.read_image(pred_path))
        gt = imaging.decode_binary(imaging.read_image(gt_path))
        records.append(metrics.evaluate_image(key, pred, gt))
    report = metrics.aggregate(records)
    if args.json:
        _write_text(args.json, report.to_json())
    if args.csv:
        _write_text(args.csv, report.to_csv())
    print("F1 | PSNR | DRD")
    print(report.table_row())
    return EXIT_OK


def cmd_sweep(args):
    h = histogram.read_csv(args.histogram)
    base = params_from_args(args)
    spec = sweeps.SweepSpec(args.param, args.min, args.max, args.count, base)
    values, ts = sweeps.sweep(h, spec)
    text = sweeps.sweep_csv(spec, values, ts)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_tune(args):
    samples = corpus.load_corpus(args.images, args.gt, allow_missing=args.allow_missing)
    kw = {"max_sweeps": args.max_sweeps}
    if args.step is not None:
        kw["steps"] = {p: args.step for p in tuner.PARAMS}
    cfg = tuner.TuneConfig.cold(**kw) if args.cold else tuner.TuneConfig(**kw)
    result = tuner.tune([(s.gray, s.gt) for s in samples], cfg)
    if args.params_out:
        _write_text(args.params_out, result.params_json())
    if args.trace_out:
        _write_text(args.trace_out, result.trace_csv())
    e = result.exponents
    print(" ".join(f"{p}_log2={e[p]}" for p in tuner.PARAMS) + f" mean_f1={result.mean_f1:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ght", description="Generalized histogram thresholding.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="threshold a histogram CSV (columns x,n)")
    p.add_argument("histogram")
    _add_algorithm(p)
    _add_param_flags(p)
    p.add_argument("--scores", metavar="CSV", help="write the per-split score curve")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("binarize", help="binarize an image or a directory of images")
    p.add_argument("input")
    p.add_argument("output", help="output image (or directory when input is a directory)")
    _add_algorithm(p)
    _add_param_flags(p)
    p.add_argument("--gt", help="ground truth image or directory; prints metrics")
    p.add_argument("--diff", help="write an error overlay (needs --gt)")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("eval", help="score binarized images against ground truth")
    p.add_argument("pred", help="directory of binarized images")
    p.add_argument("gt", help="directory of ground truth images")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--allow-missing", action="store_true", help="skip files without a counterpart")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="threshold versus one hyperparameter, as CSV")
    p.add_argument("histogram")
    p.add_argument("--param", required=True, choices=sweeps.SWEEPABLE)
    p.add_argument("--min", type=float, required=True, help="lowest log2 exponent (omega: lowest value)")
    p.add_argument("--max", type=float, required=True, help="highest log2 exponent (omega: highest value)")
    p.add_argument("--count", type=int, default=65)
    p.add_argument("-o", "--output")
    _add_param_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tune", help="coordinate descent on mean F1")
    p.add_argument("images")
    p.add_argument("gt")
    p.add_argument("--cold", action="store_true", help="start from nu=tau=kappa=1, omega=1/2")
    p.add_argument("--step", type=float, help="initial log2 step for every parameter")
    p.add_argument("--max-sweeps", type=int, default=40)
    p.add_argument("--allow-missing", action="store_true")
    p.add_argument("--params-out", metavar="JSON")
    p.add_argument("--trace-out", metavar="CSV")
    p.set_defaults(func=cmd_tune)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"ght: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"ght: error: no such file: {e}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as e:
        print(f"ght: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as e:
        print(f"ght: error: {e}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
