#!/usr/bin/env python3
"""Ingest an H-DIBCO style corpus into ``<root>/<name>/{images,gt}``.

Sources are local zip archives, local directories, or http(s) URLs to zip
archives.  No download location is built in: pass the links published on the
challenge page, or archives you already have.  Files whose stem ends in a
ground-truth suffix (``_gt``, ``-gt``, ``_GT``, ``.gt``) go to ``gt/``, every
other image goes to ``images/``.  Pairing is checked at the end.

Example:
    python3 scripts/fetch_hdibco.py DIBCO2016_dataset.zip DIBCO2016_GT.zip
    python3 -m pytest tests/test_acceptance.py -k hdibco
"""
import argparse
import shutil
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

from ght.corpus import IMAGE_EXTS, CorpusError, dataset_dirs, default_data_dir, match_pairs, stem_key


def _materialize(source: str, scratch: Path) -> Path:
    """Return a local directory holding the contents of ``source``."""
    if source.startswith(("http://", "https://")):
        target = scratch / f"download{len(list(scratch.iterdir()))}.zip"
        print(f"downloading {source}", file=sys.stderr)
        with urllib.request.urlopen(source, timeout=60) as r, open(target, "wb") as f:
            shutil.copyfileobj(r, f)
        source = str(target)
    path = Path(source)
    if path.is_dir():
        return path
    if zipfile.is_zipfile(path):
        out = scratch / f"unzipped{len(list(scratch.iterdir()))}"
        with zipfile.ZipFile(path) as z:
            z.extractall(out)
        return out
    raise SystemExit(f"not a directory or zip archive: {source}")


def _images(root: Path):
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.suffix.lower() in IMAGE_EXTS and not p.name.startswith("."):
            yield p


def ingest(sources, name: str, root: Path) -> tuple[Path, Path]:
    images, gts = dataset_dirs(name, root)
    images.mkdir(parents=True, exist_ok=True)
    gts.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        scratch = Path(tmp)
        for src in sources:
            for p in _images(_materialize(src, scratch)):
                dest = gts if stem_key(p) != p.stem else images
                shutil.copy2(p, dest / p.name)
    return images, gts


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("sources", nargs="+", help="zip archives, directories or http(s) URLs of zip archives")
    ap.add_argument("--name", default="hdibco2016", help="dataset name (default: hdibco2016)")
    ap.add_argument("--root", type=Path, default=None, help="data root (default: $GHT_DATA_DIR or ./data)")
    args = ap.parse_args(argv)

    root = default_data_dir() if args.root is None else args.root
    images, gts = ingest(args.sources, args.name, root)
    try:
        pairs = match_pairs(images, gts)
    except CorpusError as e:
        print(f"ingested, but pairing failed: {e}", file=sys.stderr)
        return 1
    print(f"{len(pairs)} image / ground-truth pairs in {images.parent}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
