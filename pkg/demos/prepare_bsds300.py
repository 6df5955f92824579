#!/usr/bin/env python3
"""Reorganize the BSDS300 human segmentations into the by-image layout.

The Berkeley BSDS300 human data (BSDS300-human.tgz, Martin et al., 2001)
ships grouped by annotator::

    BSDS300/human/color/<user>/<image>.seg
    BSDS300/human/gray/<user>/<image>.seg

while this package's loaders expect one directory per image holding all of
its members.  This script walks the source tree, validates every file with
the `.seg` parser, and copies it to::

    DEST/<image>/<user>_<color|gray>.seg

Afterwards, point the CLI or SEGFUSE_BSDS300 at DEST::

    python3 demos/prepare_bsds300.py /path/to/BSDS300 prepared/bsds300
    SEGFUSE_BSDS300=prepared/bsds300 python3 -m pytest tests/test_acceptance.py

Run:  python3 demos/prepare_bsds300.py SRC DEST [--mode color|gray|both]
"""
from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from segfuse import SegParseError, parse_seg


def find_human_root(src: Path) -> Path:
    for candidate in (src / "human", src / "BSDS300" / "human", src):
        if (candidate / "color").is_dir() or (candidate / "gray").is_dir():
            return candidate
    raise FileNotFoundError(
        f"no human/color or human/gray directory under {src}"
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("src", help="BSDS300 root (holds human/color, human/gray)")
    parser.add_argument("dest", help="output dataset directory")
    parser.add_argument(
        "--mode",
        choices=("color", "gray", "both"),
        default="both",
        help="which annotation sets to include (default: both)",
    )
    parser.add_argument(
        "--min-members",
        type=int,
        default=2,
        metavar="N",
        help="drop images with fewer than N segmentations (default: 2)",
    )
    args = parser.parse_args()

    human = find_human_root(Path(args.src))
    modes = ("color", "gray") if args.mode == "both" else (args.mode,)
    dest = Path(args.dest)

    by_image: dict[str, list[tuple[Path, str]]] = defaultdict(list)
    bad = 0
    for mode in modes:
        mode_dir = human / mode
        if not mode_dir.is_dir():
            continue
        for seg_path in sorted(mode_dir.glob("*/*.seg")):
            try:
                parse_seg(seg_path.read_bytes())
            except SegParseError as exc:
                print(f"skipping {seg_path}: {exc}", file=sys.stderr)
                bad += 1
                continue
            user = seg_path.parent.name
            by_image[seg_path.stem].append((seg_path, f"{user}_{mode}.seg"))

    written = 0
    kept_images = 0
    for image_id in sorted(by_image):
        members = by_image[image_id]
        if len(members) < args.min_members:
            continue
        image_dir = dest / image_id
        image_dir.mkdir(parents=True, exist_ok=True)
        for src_path, name in members:
            (image_dir / name).write_bytes(src_path.read_bytes())
            written += 1
        kept_images += 1

    print(f"{kept_images} images, {written} segmentations -> {dest}"
          + (f" ({bad} malformed skipped)" if bad else ""))
    return 0 if written else 1


if __name__ == "__main__":
    raise SystemExit(main())
