#!/usr/bin/env python3
"""Convert BSDS500 ground-truth .mat files into the by-image layout.

The BSDS500 distribution (Arbelaez et al., 2011) stores all human
segmentations of an image in one MATLAB file::

    BSR/BSDS500/data/groundTruth/{train,val,test}/<image>.mat

each holding a ``groundTruth`` cell array whose entries carry a
``Segmentation`` label matrix (1-based, no background).  This script
extracts every annotator's matrix and writes it as a `.seg` file under::

    DEST/<image>/gt_<j>.seg

Afterwards, point the CLI or SEGFUSE_BSDS500 at DEST::

    python3 demos/prepare_bsds500.py /path/to/BSR prepared/bsds500
    SEGFUSE_BSDS500=prepared/bsds500 python3 -m pytest tests/test_acceptance.py

Run:  python3 demos/prepare_bsds500.py SRC DEST [--splits train,val,test]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy.io import loadmat

from segfuse import LabelMap, write_seg


def find_ground_truth(src: Path) -> Path:
    for candidate in (
        src,
        src / "groundTruth",
        src / "BSDS500" / "data" / "groundTruth",
        src / "BSR" / "BSDS500" / "data" / "groundTruth",
    ):
        if any((candidate / split).is_dir() for split in ("train", "val", "test")):
            return candidate
    raise FileNotFoundError(f"no groundTruth/{{train,val,test}} under {src}")


def segmentations(mat_path: Path):
    """Yield each annotator's label matrix from one groundTruth file."""
    cells = loadmat(str(mat_path))["groundTruth"].ravel()
    for cell in cells:
        entry = cell[0, 0] if cell.ndim == 2 else cell[0]
        if entry.dtype.names and "Segmentation" in entry.dtype.names:
            seg = entry["Segmentation"]
        else:  # positional fallback: Segmentation is the first field
            seg = entry[0]
        seg = np.asarray(seg, dtype=np.int64)
        if seg.ndim != 2 or seg.min() < 1:
            raise ValueError(f"{mat_path}: unexpected segmentation payload")
        yield seg


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("src", help="BSR root (or the groundTruth directory)")
    parser.add_argument("dest", help="output dataset directory")
    parser.add_argument(
        "--splits",
        default="train,val,test",
        metavar="S,S",
        help="which splits to convert (default: train,val,test)",
    )
    args = parser.parse_args()

    ground_truth = find_ground_truth(Path(args.src))
    dest = Path(args.dest)
    images = 0
    members = 0
    for split in args.splits.split(","):
        split_dir = ground_truth / split.strip()
        if not split_dir.is_dir():
            print(f"skipping missing split {split_dir}", file=sys.stderr)
            continue
        for mat_path in sorted(split_dir.glob("*.mat")):
            image_dir = dest / mat_path.stem
            image_dir.mkdir(parents=True, exist_ok=True)
            for j, seg in enumerate(segmentations(mat_path)):
                (image_dir / f"gt_{j}.seg").write_bytes(
                    write_seg(LabelMap(seg))
                )
                members += 1
            images += 1

    print(f"{images} images, {members} segmentations -> {dest}")
    return 0 if members else 1


if __name__ == "__main__":
    raise SystemExit(main())
