"""Dataset-level benchmark runs: fuse every image, score, aggregate.

Drives the fusion pipeline over a whole dataset directory (see
:func:`segfuse.segio.load_group` for the expected layout) and evaluates each
consensus with the region benchmarks, producing:

* ``records.jsonl`` -- one self-describing JSON record per image, in image-id
  order, byte-deterministic for a fixed configuration;
* ``summary.txt`` -- dataset means in benchmark-table column order
  (GCE, VOI, PRI, BDE, COV);
* ``hist_regions_original.txt`` / ``hist_regions_consensus.txt`` -- region
  count histograms (column text: ``regions<TAB>frequency``) of the input
  segmentations pooled over members, and of the consensus results;
* ``failures.txt`` -- any per-image errors (the run continues past them).

Two evaluation protocols are available.  The default scores the consensus
against *all* human segmentations of the image, including the fusion inputs
(the only ground truths there are).  ``leave_one_out`` instead fuses each
L-1 subset and scores it against the held-out member only, averaging over
the L holdouts -- an unbiased but more pessimistic protocol.

``human_baseline`` computes the inter-annotator calibration row: each human
segmentation scored against the remaining ones, averaged per image.
"""
from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fusion import FusionOptions, run_fusion
from .metrics import score_against_refs
from .segio import list_image_ids, load_group
from .types import (
    METRIC_FIELDS,
    ImageScores,
    MetricReport,
    SegmentationGroup,
    region_count,
)

PROTOCOL_ALL = "all"
PROTOCOL_LOO = "leave_one_out"


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark run: where the data is, how to fuse, where output goes."""

    dataset_root: str
    output_dir: str
    options: FusionOptions = FusionOptions()
    leave_one_out: bool = False
    image_ids: tuple[str, ...] | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.image_ids is not None:
            object.__setattr__(self, "image_ids", tuple(self.image_ids))


@dataclass(frozen=True)
class BenchRecord:
    """Everything recorded about one image's fusion + evaluation."""

    image_id: str
    members: int
    protocol: str
    gce: float
    voi: float
    pri: float
    bde: float
    covering: float
    k_requested: float
    k_used: float
    iterations: float
    cost: float
    member_region_counts: tuple[int, ...]
    consensus_region_counts: tuple[int, ...]

    def scores(self) -> ImageScores:
        return ImageScores(
            image_id=self.image_id,
            gce=self.gce,
            voi=self.voi,
            pri=self.pri,
            bde=self.bde,
            covering=self.covering,
        )

    def as_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "members": self.members,
            "protocol": self.protocol,
            "gce": self.gce,
            "voi": self.voi,
            "pri": self.pri,
            "bde": self.bde,
            "covering": self.covering,
            "k_requested": self.k_requested,
            "k_used": self.k_used,
            "iterations": self.iterations,
            "cost": self.cost,
            "member_region_counts": list(self.member_region_counts),
            "consensus_region_counts": list(self.consensus_region_counts),
        }


def _single_fusion_record(group: SegmentationGroup, options: FusionOptions) -> BenchRecord:
    result = run_fusion(group, options)
    s = score_against_refs(group.image_id, result.consensus, group.members)
    model = result.model
    return BenchRecord(
        image_id=group.image_id,
        members=group.size,
        protocol=PROTOCOL_ALL,
        gce=s.gce,
        voi=s.voi,
        pri=s.pri,
        bde=s.bde,
        covering=s.covering,
        k_requested=float(result.k_requested),
        k_used=float(result.k_used),
        iterations=float(model.iterations if model else 0),
        cost=float(model.cost if model else 0),
        member_region_counts=tuple(region_count(m) for m in group.members),
        consensus_region_counts=(region_count(result.consensus),),
    )


def _leave_one_out_record(group: SegmentationGroup, options: FusionOptions) -> BenchRecord:
    if group.size < 2:
        raise ValueError(
            f"leave-one-out needs at least 2 members, image {group.image_id} has {group.size}"
        )
    metric_sums = dict.fromkeys(METRIC_FIELDS, 0.0)
    k_req = k_used = iters = cost = 0.0
    consensus_regions = []
    for holdout in range(group.size):
        keep = [i for i in range(group.size) if i != holdout]
        subgroup = SegmentationGroup(
            image_id=group.image_id,
            members=tuple(group.members[i] for i in keep),
            confidences=tuple(group.confidences[i] for i in keep),
        )
        result = run_fusion(subgroup, options)
        s = score_against_refs(
            group.image_id, result.consensus, [group.members[holdout]]
        )
        for name in METRIC_FIELDS:
            metric_sums[name] += getattr(s, name)
        k_req += result.k_requested
        k_used += result.k_used
        iters += result.model.iterations if result.model else 0
        cost += result.model.cost if result.model else 0
        consensus_regions.append(region_count(result.consensus))
    L = group.size
    return BenchRecord(
        image_id=group.image_id,
        members=L,
        protocol=PROTOCOL_LOO,
        gce=metric_sums["gce"] / L,
        voi=metric_sums["voi"] / L,
        pri=metric_sums["pri"] / L,
        bde=metric_sums["bde"] / L,
        covering=metric_sums["covering"] / L,
        k_requested=k_req / L,
        k_used=k_used / L,
        iterations=iters / L,
        cost=cost / L,
        member_region_counts=tuple(region_count(m) for m in group.members),
        consensus_region_counts=tuple(consensus_regions),
    )


def evaluate_group(
    group: SegmentationGroup,
    options: FusionOptions,
    leave_one_out: bool = False,
) -> BenchRecord:
    """Fuse one group and score the consensus (see module docstring)."""
    if leave_one_out:
        return _leave_one_out_record(group, options)
    return _single_fusion_record(group, options)


def _evaluate_safe(args) -> tuple[str, BenchRecord | None, str]:
    dataset_root, image_id, options, leave_one_out = args
    try:
        group = load_group(dataset_root, image_id)
        return image_id, evaluate_group(group, options, leave_one_out), ""
    except Exception as exc:  # recorded per image; the run continues
        return image_id, None, f"{type(exc).__name__}: {exc}"


def _run_tasks(tasks, jobs: int, worker):
    if jobs == 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


@dataclass(frozen=True)
class BenchResult:
    """Outcome of a benchmark run (also materialized in ``output_dir``)."""

    config: BenchConfig
    records: tuple[BenchRecord, ...]
    failures: tuple[tuple[str, str], ...]

    def report(self) -> MetricReport:
        return MetricReport(records=tuple(r.scores() for r in self.records))

    def mean_member_regions(self) -> float:
        pooled = [c for r in self.records for c in r.member_region_counts]
        return float(np.mean(pooled))

    def mean_consensus_regions(self) -> float:
        pooled = [c for r in self.records for c in r.consensus_region_counts]
        return float(np.mean(pooled))


def _histogram_text(values) -> str:
    hist = Counter(values)
    lines = [f"{v}\t{hist[v]}" for v in sorted(hist)]
    return "\n".join(lines) + "\n" if lines else ""


def _summary_text(result: BenchResult) -> str:
    config = result.config
    lines = [
        f"dataset: {config.dataset_root}",
        f"images: {len(result.records)} ok, {len(result.failures)} failed",
        f"protocol: {PROTOCOL_LOO if config.leave_one_out else PROTOCOL_ALL}",
        f"init: {config.options.init_method.value}",
        f"threshold: {config.options.confidence_threshold}",
    ]
    if result.records:
        means = result.report().means()
        header = f"{'GCE':>8} {'VOI':>8} {'PRI':>8} {'BDE':>8} {'COV':>8}"
        row = (
            f"{means['gce']:>8.4f} {means['voi']:>8.4f} {means['pri']:>8.4f} "
            f"{means['bde']:>8.4f} {means['covering']:>8.4f}"
        )
        lines += [
            header,
            row,
            f"mean regions (original): {result.mean_member_regions():.3f}",
            f"mean regions (consensus): {result.mean_consensus_regions():.3f}",
        ]
    return "\n".join(lines) + "\n"


def run_bench(config: BenchConfig) -> BenchResult:
    """Benchmark a dataset directory and write all artifacts to output_dir."""
    image_ids = (
        config.image_ids
        if config.image_ids is not None
        else list_image_ids(config.dataset_root)
    )
    image_ids = tuple(sorted(image_ids))
    tasks = [
        (config.dataset_root, image_id, config.options, config.leave_one_out)
        for image_id in image_ids
    ]
    outcomes = _run_tasks(tasks, config.jobs, _evaluate_safe)

    records = []
    failures = []
    for image_id, record, error in outcomes:
        if record is None:
            failures.append((image_id, error))
        else:
            records.append(record)
    records.sort(key=lambda r: r.image_id)
    failures.sort()
    result = BenchResult(
        config=config, records=tuple(records), failures=tuple(failures)
    )

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for record in result.records:
            fh.write(json.dumps(record.as_dict(), sort_keys=True) + "\n")
    (out / "summary.txt").write_text(_summary_text(result), encoding="utf-8")
    (out / "hist_regions_original.txt").write_text(
        _histogram_text(
            [c for r in result.records for c in r.member_region_counts]
        ),
        encoding="utf-8",
    )
    (out / "hist_regions_consensus.txt").write_text(
        _histogram_text(
            [c for r in result.records for c in r.consensus_region_counts]
        ),
        encoding="utf-8",
    )
    if result.failures:
        (out / "failures.txt").write_text(
            "".join(f"{image_id}\t{error}\n" for image_id, error in result.failures),
            encoding="utf-8",
        )
    return result


def _human_one(args) -> tuple[str, ImageScores | None, str]:
    dataset_root, image_id = args
    try:
        group = load_group(dataset_root, image_id)
        if group.size < 2:
            raise ValueError(
                f"inter-annotator baseline needs >= 2 members, got {group.size}"
            )
        sums = dict.fromkeys(METRIC_FIELDS, 0.0)
        for i, candidate in enumerate(group.members):
            others = [m for j, m in enumerate(group.members) if j != i]
            s = score_against_refs(image_id, candidate, others)
            for name in METRIC_FIELDS:
                sums[name] += getattr(s, name)
        L = group.size
        return (
            image_id,
            ImageScores(image_id=image_id, **{k: v / L for k, v in sums.items()}),
            "",
        )
    except Exception as exc:
        return image_id, None, f"{type(exc).__name__}: {exc}"


def human_baseline(
    dataset_root,
    image_ids=None,
    jobs: int = 1,
) -> tuple[MetricReport, tuple[tuple[str, str], ...]]:
    """Inter-annotator agreement: each human scored against the others.

    Returns the per-image report (scores averaged over annotators) plus any
    per-image failures.  This is the calibration row that pins down metric
    conventions against published human-vs-human numbers.
    """
    if image_ids is None:
        image_ids = list_image_ids(dataset_root)
    image_ids = tuple(sorted(image_ids))
    outcomes = _run_tasks(
        [(dataset_root, image_id) for image_id in image_ids], jobs, _human_one
    )
    records = []
    failures = []
    for image_id, scores, error in outcomes:
        if scores is None:
            failures.append((image_id, error))
        else:
            records.append(scores)
    records.sort(key=lambda s: s.image_id)
    failures.sort()
    return MetricReport(records=tuple(records)), tuple(failures)
