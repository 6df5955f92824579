"""Command-line interface: ``segfuse fuse|eval|bench``.

* ``fuse GROUP_DIR`` -- fuse the segmentations in one image directory into a
  consensus, written as a label raster (plus a color render, a ``.seg`` file
  when the consensus is background-free, and a run manifest).
* ``eval CANDIDATE REFS_DIR`` -- score one segmentation against a directory
  of reference segmentations with GCE/VOI/PRI/BDE/covering.
* ``bench DATASET_ROOT`` -- fuse and score a whole dataset, writing records,
  a summary table and region-count histograms.

Shared flags: ``--init {vec,attr,random}`` picks the K-Modes seeding
strategy, ``--threshold`` the confidence cut, ``--k`` overrides the cluster
count, ``--max-iters`` and ``--seed`` control the clustering, ``--out`` the
output location.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bench import BenchConfig, run_bench
from .fusion import FusionOptions, run_fusion
from .kmodes import InitMethod
from .metrics import score_against_refs
from .segio import (
    MEMBER_SUFFIXES,
    load_group,
    parse_seg,
    read_label_image,
    save_color_render,
    write_label_image,
    write_seg,
)
from .types import METRIC_FIELDS, region_count

INIT_CHOICES = {
    "vec": InitMethod.VECTOR_DENSITY,
    "attr": InitMethod.ATTRIBUTE_DENSITY,
    "random": InitMethod.RANDOM,
}


def _add_fusion_flags(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--init",
        choices=sorted(INIT_CHOICES),
        default="vec",
        help="mode seeding strategy (default: vec, the density of whole vectors)",
    )
    parser.add_argument(
        "--threshold",
        type=float,
        default=0.75,
        metavar="T",
        help="confidence threshold for the agreement mask (default: 0.75)",
    )
    parser.add_argument(
        "--k",
        type=int,
        default=None,
        metavar="K",
        help="cluster count override (default: rounded mean region count)",
    )
    parser.add_argument(
        "--max-iters",
        type=int,
        default=100,
        metavar="N",
        help="K-Modes iteration cap (default: 100)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        metavar="S",
        help="RNG seed, used only by --init random",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segfuse",
        description="Fuse human image segmentations into a consensus and "
        "evaluate it with region benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fuse_p = sub.add_parser(
        "fuse", help="fuse one image's segmentations into a consensus"
    )
    fuse_p.add_argument(
        "group_dir", help="directory holding the image's .seg/.png members"
    )
    _add_fusion_flags(fuse_p)
    fuse_p.add_argument(
        "--out", default="segfuse-out", metavar="DIR", help="output directory"
    )

    eval_p = sub.add_parser(
        "eval", help="score a segmentation against reference segmentations"
    )
    eval_p.add_argument("candidate", help="candidate .seg or label .png file")
    eval_p.add_argument(
        "refs_dir", help="directory of reference .seg/.png files"
    )
    eval_p.add_argument(
        "--out",
        default=None,
        metavar="FILE",
        help="also write the scores as a JSON-lines record",
    )

    bench_p = sub.add_parser(
        "bench", help="fuse and score every image of a dataset directory"
    )
    bench_p.add_argument(
        "dataset_root", help="dataset directory (one subdirectory per image)"
    )
    _add_fusion_flags(bench_p)
    bench_p.add_argument(
        "--leave-one-out",
        action="store_true",
        help="fuse each L-1 subset and score against the held-out member",
    )
    bench_p.add_argument(
        "--jobs",
        type=int,
        default=1,
        metavar="N",
        help="worker processes (default: 1)",
    )
    bench_p.add_argument(
        "--images",
        default=None,
        metavar="ID,ID,...",
        help="restrict the run to a comma-separated list of image ids",
    )
    bench_p.add_argument(
        "--out", default="bench-out", metavar="DIR", help="output directory"
    )
    return parser


def _options_from_args(args) -> FusionOptions:
    return FusionOptions(
        confidence_threshold=args.threshold,
        init_method=INIT_CHOICES[args.init],
        max_iterations=args.max_iters,
        seed=args.seed,
        k_override=args.k,
    )


def _read_segmentation(path: Path):
    if path.suffix.lower() == ".seg":
        return parse_seg(path.read_bytes())
    return read_label_image(str(path))


def cmd_fuse(args) -> int:
    group_dir = Path(args.group_dir)
    group = load_group(group_dir.parent, group_dir.name)
    options = _options_from_args(args)
    started = time.perf_counter()
    result = run_fusion(group, options)
    elapsed = time.perf_counter() - started

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_label_image(result.consensus, out / "consensus.png")
    save_color_render(result.consensus, out / "consensus_colors.png")
    if (result.consensus.labels == 0).any():
        seg_note = "skipped (consensus contains background pixels)"
    else:
        (out / "consensus.seg").write_bytes(write_seg(result.consensus))
        seg_note = "consensus.seg"

    model = result.model
    manifest = "\n".join(
        [
            f"image: {group.image_id}",
            f"members: {group.size}",
            f"init: {options.init_method.value}",
            f"threshold: {options.confidence_threshold}",
            f"k_requested: {result.k_requested}",
            f"k_used: {result.k_used}",
            f"iterations: {model.iterations if model else 0}",
            f"cost: {model.cost if model else 0}",
            f"consensus_regions: {region_count(result.consensus)}",
            f"seg_file: {seg_note}",
            f"elapsed_seconds: {elapsed:.3f}",
        ]
    ) + "\n"
    (out / "manifest.txt").write_text(manifest, encoding="utf-8")
    sys.stdout.write(manifest)
    return 0


def cmd_eval(args) -> int:
    candidate_path = Path(args.candidate)
    candidate = _read_segmentation(candidate_path)
    refs_dir = Path(args.refs_dir)
    if not refs_dir.is_dir():
        raise FileNotFoundError(f"no reference directory {refs_dir}")
    ref_paths = sorted(
        p for p in refs_dir.iterdir()
        if p.is_file() and p.suffix.lower() in MEMBER_SUFFIXES
    )
    if not ref_paths:
        raise FileNotFoundError(f"no reference segmentations in {refs_dir}")
    refs = [_read_segmentation(p) for p in ref_paths]

    scores = score_against_refs(candidate_path.stem, candidate, refs)
    for name in METRIC_FIELDS:
        sys.stdout.write(f"{name:>9}: {getattr(scores, name):.6f}\n")
    record = json.dumps(scores.as_dict(), sort_keys=True)
    if args.out:
        Path(args.out).write_text(record + "\n", encoding="utf-8")
    else:
        sys.stdout.write(record + "\n")
    return 0


def cmd_bench(args) -> int:
    config = BenchConfig(
        dataset_root=args.dataset_root,
        output_dir=args.out,
        options=_options_from_args(args),
        leave_one_out=args.leave_one_out,
        image_ids=tuple(args.images.split(",")) if args.images else None,
        jobs=args.jobs,
    )
    started = time.perf_counter()
    result = run_bench(config)
    elapsed = time.perf_counter() - started

    sys.stdout.write((Path(args.out) / "summary.txt").read_text(encoding="utf-8"))
    sys.stdout.write(f"elapsed_seconds: {elapsed:.1f}\n")
    if result.failures:
        for image_id, error in result.failures:
            sys.stderr.write(f"failed: {image_id}: {error}\n")
        return 1
    return 0


_COMMANDS = {"fuse": cmd_fuse, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
