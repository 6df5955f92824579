#!/usr/bin/env python3
"""Benchmark fusion over a dataset directory, end to end.

Without arguments the script synthesizes a small dataset first: each image
is a Voronoi partition, and its "annotators" are copies whose seed points
were jittered -- agreement on structure, disagreement on boundaries, like
real annotation groups.  Point ``--dataset`` at a prepared directory (one
subdirectory of ``.seg``/``.png`` members per image, e.g. the output of
``demos/prepare_bsds300.py``) to benchmark real data instead.

Both evaluation protocols run: consensus-vs-all-members, and leave-one-out
(fuse L-1 members, score against the holdout).  Output directories hold
``records.jsonl``, ``summary.txt`` and the region-count histograms.

Run:  python3 demos/bsds_benchmark.py [--images 8] [--members 4] [--out DIR]
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from segfuse import BenchConfig, LabelMap, normalize_labels, run_bench, write_seg


def voronoi_group(rng, members: int, shape=(40, 60), regions=6):
    """One image's annotators: jittered copies of one Voronoi partition."""
    height, width = shape
    points = rng.uniform(0.0, 1.0, size=(regions, 2)) * (height, width)
    yy, xx = np.mgrid[0:height, 0:width]
    maps = []
    for _ in range(members):
        jittered = points + rng.normal(scale=1.5, size=points.shape)
        squared = (yy[..., None] - jittered[:, 0]) ** 2 + (
            xx[..., None] - jittered[:, 1]
        ) ** 2
        maps.append(normalize_labels(LabelMap(squared.argmin(axis=-1) + 1)))
    return maps


def synthesize(root: Path, images: int, members: int, seed: int):
    rng = np.random.default_rng(seed)
    for index in range(images):
        directory = root / f"img{index:03d}"
        directory.mkdir(parents=True)
        regions = int(rng.integers(4, 9))
        for j, member in enumerate(
            voronoi_group(rng, members, regions=regions)
        ):
            (directory / f"annotator_{j}.seg").write_bytes(write_seg(member))
    print(f"synthesized {images} images x {members} annotators under {root}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dataset", default=None,
                        help="prepared dataset directory (default: synthesize)")
    parser.add_argument("--images", type=int, default=8)
    parser.add_argument("--members", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default="bench-demo")
    args = parser.parse_args()

    out = Path(args.out)
    if args.dataset:
        dataset = Path(args.dataset)
    else:
        dataset = out / "synthetic-data"
        synthesize(dataset, args.images, args.members, args.seed)

    for label, loo in (("consensus vs all members", False),
                       ("leave one out", True)):
        run_dir = out / ("loo" if loo else "all")
        result = run_bench(
            BenchConfig(
                dataset_root=str(dataset),
                output_dir=str(run_dir),
                leave_one_out=loo,
                jobs=args.jobs,
            )
        )
        print(f"\n=== {label} -> {run_dir}")
        print((run_dir / "summary.txt").read_text(), end="")
        for image_id, error in result.failures:
            print(f"  failed: {image_id}: {error}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
