"""Core value types shared across the fusion pipeline, clustering and metrics.

Conventions used everywhere in this package:

* label maps are 2-D integer arrays of shape ``(height, width)``, row-major;
* label ``0`` is the reserved background sentinel; human annotations use
  labels ``>= 1``;
* a "normalized" map has its non-zero labels relabeled to the dense range
  ``1..J`` in row-major first-occurrence order;
* region identity is label equality, not spatial connectivity -- a region may
  consist of disconnected components.

All types are immutable after construction (arrays are marked read-only) and
safe to share between workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LABEL_DTYPE = np.int32


def _as_label_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (height, width), got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must have an integer dtype, got {arr.dtype}")
    if arr.size and arr.min() < 0:
        raise ValueError(f"{name} must be non-negative")
    arr = np.ascontiguousarray(arr, dtype=LABEL_DTYPE)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabelMap:
    """One segmentation: a grid of region labels, 0 meaning background."""

    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _as_label_array(self.labels, "labels"))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


@dataclass(frozen=True)
class SegmentationGroup:
    """All human segmentations of one image plus their expert confidences."""

    image_id: str
    members: tuple[LabelMap, ...]
    confidences: tuple[float, ...]

    def __post_init__(self):
        members = tuple(self.members)
        confidences = tuple(float(c) for c in self.confidences)
        if len(members) < 1:
            raise ValueError("a segmentation group needs at least one member")
        if len(confidences) != len(members):
            raise ValueError(
                f"{len(members)} members but {len(confidences)} confidences"
            )
        shape = members[0].shape
        for i, m in enumerate(members):
            if m.shape != shape:
                raise ValueError(
                    f"member {i} has shape {m.shape}, expected {shape}"
                )
        for i, c in enumerate(confidences):
            if not (0.0 <= c <= 1.0):
                raise ValueError(f"confidence {i} = {c} outside [0, 1]")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "confidences", confidences)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def shape(self) -> tuple[int, int]:
        return self.members[0].shape


@dataclass(frozen=True)
class FeatureMap:
    """A segmentation re-expressed with globally unique region ids.

    Ids from different source segmentations are disjoint, so equal values
    always mean "same region of the same annotator".  0 stays background.
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_label_array(self.values, "values"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class ConfidenceMap:
    """Per-pixel mean annotator confidence, in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("confidence values must lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class FeatureVectorSet:
    """Deduplicated per-pixel categorical vectors with multiplicities.

    ``vectors`` holds the distinct rows, ``counts`` how many pixels carry each
    row, and ``origin_index`` maps every pixel back to its row so cluster
    assignments can be reshaped to image resolution.
    """

    arity: int
    vectors: np.ndarray       # (n_distinct, arity)
    counts: np.ndarray        # (n_distinct,)
    origin_index: np.ndarray  # (height, width), values index `vectors`

    def __post_init__(self):
        vectors = np.ascontiguousarray(np.asarray(self.vectors), dtype=LABEL_DTYPE)
        counts = np.ascontiguousarray(np.asarray(self.counts), dtype=np.int64)
        origin = np.ascontiguousarray(np.asarray(self.origin_index), dtype=np.int64)
        if vectors.ndim != 2 or vectors.shape[1] != self.arity:
            raise ValueError(
                f"vectors must have shape (n, {self.arity}), got {vectors.shape}"
            )
        n = vectors.shape[0]
        if counts.shape != (n,):
            raise ValueError("counts must have one entry per distinct vector")
        if n and counts.min() < 1:
            raise ValueError("every distinct vector needs count >= 1")
        if origin.ndim != 2:
            raise ValueError("origin_index must be 2-D (height, width)")
        if counts.sum() != origin.size:
            raise ValueError("counts must sum to the pixel count")
        if origin.size and (origin.min() < 0 or origin.max() >= n):
            raise ValueError("origin_index refers outside the vector table")
        if n and len(np.unique(vectors, axis=0)) != n:
            raise ValueError("vectors must be distinct")
        for arr in (vectors, counts, origin):
            arr.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "origin_index", origin)

    @property
    def n_distinct(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class ClusterModel:
    """Result of K-Modes clustering over a weighted vector set.

    ``cost`` is the multiplicity-weighted total simple-matching dissimilarity
    of every vector to its assigned mode; it is integral and exactly
    recomputable from the other fields.  ``cost_history`` records the cost
    after each batch iteration (diagnostic; non-increasing).
    """

    modes: np.ndarray       # (k, arity)
    assignment: np.ndarray  # (n_distinct,), cluster index per vector
    iterations: int
    cost: int
    cost_history: tuple[int, ...] = field(default=())

    def __post_init__(self):
        modes = np.ascontiguousarray(np.asarray(self.modes), dtype=LABEL_DTYPE)
        assignment = np.ascontiguousarray(np.asarray(self.assignment), dtype=np.int64)
        if modes.ndim != 2:
            raise ValueError("modes must be 2-D (k, arity)")
        if assignment.ndim != 1:
            raise ValueError("assignment must be 1-D")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= modes.shape[0]):
            raise ValueError("assignment refers outside the mode table")
        modes.setflags(write=False)
        assignment.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "cost", int(self.cost))
        object.__setattr__(self, "cost_history", tuple(int(c) for c in self.cost_history))

    @property
    def k(self) -> int:
        return self.modes.shape[0]


@dataclass(frozen=True)
class ImageScores:
    """Benchmark scores of one candidate segmentation for one image."""

    image_id: str
    gce: float
    voi: float
    pri: float
    bde: float
    covering: float

    def __post_init__(self):
        for name in ("gce", "pri", "covering"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} = {v} outside [0, 1]")
        for name in ("voi", "bde"):
            v = getattr(self, name)
            if v < 0.0:
                raise ValueError(f"{name} = {v} negative")

    def as_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "gce": self.gce,
            "voi": self.voi,
            "pri": self.pri,
            "bde": self.bde,
            "covering": self.covering,
        }


METRIC_FIELDS = ("gce", "voi", "pri", "bde", "covering")


@dataclass(frozen=True)
class MetricReport:
    """Per-image benchmark records plus dataset means."""

    records: tuple[ImageScores, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def means(self) -> dict[str, float]:
        if not self.records:
            raise ValueError("empty report has no means")
        return {
            name: float(np.mean([getattr(r, name) for r in self.records]))
            for name in METRIC_FIELDS
        }


def normalize_labels(label_map: LabelMap) -> LabelMap:
    """Relabel non-zero labels to 1..J in row-major first-occurrence order.

    Background 0 is preserved.  Idempotent, and two pixels share a label
    before exactly when they share one after.
    """
    flat = label_map.labels.ravel()
    values, first_index, inverse = np.unique(
        flat, return_index=True, return_inverse=True
    )
    new_ids = np.empty(len(values), dtype=LABEL_DTYPE)
    next_id = 1
    for pos in np.argsort(first_index, kind="stable"):
        if values[pos] == 0:
            new_ids[pos] = 0
        else:
            new_ids[pos] = next_id
            next_id += 1
    return LabelMap(new_ids[inverse].reshape(label_map.shape))


def region_count(label_map: LabelMap) -> int:
    """Number of distinct non-zero labels."""
    distinct = np.unique(label_map.labels)
    n = len(distinct)
    if n and distinct[0] == 0:
        n -= 1
    return int(n)


def partitions_equal(a: LabelMap, b: LabelMap) -> bool:
    """True when both maps induce the same pixel partition (names may differ).

    Background is significant: pixels labeled 0 in one map must be labeled 0
    in the other.  First-occurrence normalization is a canonical encoding of
    a partition, so equality of the normalized arrays decides.
    """
    if a.shape != b.shape:
        return False
    return bool(
        np.array_equal(normalize_labels(a).labels, normalize_labels(b).labels)
    )
