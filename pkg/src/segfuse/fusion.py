"""Consensus fusion of multiple human segmentations of one image.

The pipeline turns a :class:`~segfuse.types.SegmentationGroup` into a single
consensus :class:`~segfuse.types.LabelMap`:

1. every region of every annotator receives a globally unique id
   (:func:`assign_global_ids`), so equal values always mean "same region of
   the same annotator";
2. per-pixel annotator agreement is summarized by the confidence map
   ``C = (1/L) * sum_i B_i * p_i`` where ``B_i`` flags the pixels annotator
   ``i`` labeled and ``p_i`` is that annotator's confidence
   (:func:`compute_confidence_map`);
3. pixels whose confidence falls below a threshold (0.75 by default -- at
   least three quarters of unit-confidence annotators agree) are masked into
   background in *every* feature map (:func:`binarize_confidence_map`,
   :func:`mask_feature_maps`);
4. each pixel becomes a length-L categorical vector of global region ids;
   duplicate vectors are pooled with multiplicities
   (:func:`build_feature_vectors`);
5. the distinct non-background vectors are clustered by weighted K-Modes
   with K = the rounded mean region count of the inputs
   (:func:`select_cluster_count`, :mod:`segfuse.kmodes`);
6. cluster indices are reshaped back to image resolution and normalized;
   fully-masked pixels keep the background label 0.

Everything is deterministic: ties in clustering are broken by fixed rules,
and members are brought into a canonical order first so the result is
invariant to the order annotations arrive in.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .kmodes import InitMethod, cluster_vectors
from .types import (
    LABEL_DTYPE,
    ClusterModel,
    ConfidenceMap,
    FeatureMap,
    FeatureVectorSet,
    LabelMap,
    SegmentationGroup,
    normalize_labels,
    region_count,
)


class KClampedWarning(UserWarning):
    """Requested cluster count exceeded the distinct foreground vectors."""


@dataclass(frozen=True)
class FusionOptions:
    """Tunable knobs of the fusion pipeline.

    ``k_override`` fixes the cluster count instead of deriving it from the
    mean region count of the members.  ``seed`` only matters for
    ``InitMethod.RANDOM``.
    """

    confidence_threshold: float = 0.75
    init_method: InitMethod = InitMethod.VECTOR_DENSITY
    max_iterations: int = 100
    seed: int | None = None
    k_override: int | None = None

    def __post_init__(self):
        t = float(self.confidence_threshold)
        if not (0.0 < t <= 1.0):
            raise ValueError(f"confidence_threshold must be in (0, 1], got {t}")
        object.__setattr__(self, "confidence_threshold", t)
        object.__setattr__(self, "init_method", InitMethod(self.init_method))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k_override must be >= 1 when given")


@dataclass(frozen=True)
class FusionResult:
    """Everything the pipeline produced, for inspection beyond the consensus.

    ``member_order`` is the canonical permutation applied to the input
    members (and confidences); feature-vector attribute ``j`` corresponds to
    input member ``member_order[j]``.  ``model`` is None when every pixel was
    masked out and nothing was left to cluster.
    """

    consensus: LabelMap
    model: ClusterModel | None
    confidence: ConfidenceMap
    mask: np.ndarray
    vectors: FeatureVectorSet
    k_requested: int
    k_used: int
    member_order: tuple[int, ...]

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "member_order", tuple(int(i) for i in self.member_order))


def assign_global_ids(group: SegmentationGroup) -> tuple[FeatureMap, ...]:
    """Re-express each member with globally unique region ids.

    Member 0 keeps ids ``1..J_0``, member 1 gets ``J_0+1..J_0+J_1`` and so
    on; background 0 maps to 0 everywhere.  Members are normalized first, so
    arbitrary non-negative labels are accepted.
    """
    maps = []
    offset = 0
    for member in group.members:
        norm = normalize_labels(member)
        values = norm.labels.copy()
        values[values != 0] += offset
        maps.append(FeatureMap(values))
        offset += region_count(norm)
    return tuple(maps)


def compute_confidence_map(group: SegmentationGroup) -> ConfidenceMap:
    """Per-pixel mean confidence of the annotators that labeled the pixel.

    ``C = (1/L) * sum_i B_i * p_i`` with ``B_i = (member_i != 0)``.
    """
    total = np.zeros(group.shape, dtype=np.float64)
    for member, p in zip(group.members, group.confidences):
        total += (member.labels != 0) * p
    return ConfidenceMap(total / group.size)


def binarize_confidence_map(confidence: ConfidenceMap, threshold: float) -> np.ndarray:
    """Boolean mask of the pixels meeting the agreement threshold (closed: >=)."""
    threshold = float(threshold)
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    return confidence.values >= threshold


def mask_feature_maps(
    maps: tuple[FeatureMap, ...] | list[FeatureMap], mask: np.ndarray
) -> tuple[FeatureMap, ...]:
    """Send every feature map to background 0 where the mask is false."""
    mask = np.asarray(mask, dtype=bool)
    out = []
    for fm in maps:
        if fm.shape != mask.shape:
            raise ValueError(f"mask shape {mask.shape} != map shape {fm.shape}")
        out.append(FeatureMap(np.where(mask, fm.values, 0)))
    return tuple(out)


def build_feature_vectors(
    maps: tuple[FeatureMap, ...] | list[FeatureMap],
) -> FeatureVectorSet:
    """Pool the per-pixel global-id vectors into distinct rows with counts.

    Rows come out in lexicographic order (``np.unique`` over rows), which
    every later tie-break keys on, so the whole pipeline is reproducible.
    """
    if len(maps) < 1:
        raise ValueError("need at least one feature map")
    shape = maps[0].shape
    for fm in maps:
        if fm.shape != shape:
            raise ValueError("feature maps must share dimensions")
    stack = np.stack([fm.values for fm in maps], axis=-1)
    flat = stack.reshape(-1, len(maps))
    vectors, inverse, counts = np.unique(
        flat, axis=0, return_inverse=True, return_counts=True
    )
    return FeatureVectorSet(
        arity=len(maps),
        vectors=vectors,
        counts=counts,
        origin_index=inverse.reshape(shape),
    )


def select_cluster_count(group: SegmentationGroup) -> int:
    """Mean region count over members, rounded half up, floored at 1."""
    s = sum(region_count(m) for m in group.members)
    L = group.size
    # floor(s/L + 1/2) in exact integer arithmetic
    return max(1, (2 * s + L) // (2 * L))


def canonical_member_order(group: SegmentationGroup) -> tuple[int, ...]:
    """Permutation that sorts members by normalized label content.

    Stable, so identical members keep their relative input order (they are
    interchangeable anyway).  Fusing in this canonical order makes every
    downstream tie-break -- and therefore the consensus -- independent of the
    order the annotations arrived in.
    """
    keys = [normalize_labels(m).labels.tobytes() for m in group.members]
    return tuple(sorted(range(group.size), key=keys.__getitem__))


def run_fusion(
    group: SegmentationGroup, options: FusionOptions | None = None
) -> FusionResult:
    """Run the whole pipeline and return all intermediate products."""
    if options is None:
        options = FusionOptions()

    order = canonical_member_order(group)
    ordered = SegmentationGroup(
        image_id=group.image_id,
        members=tuple(group.members[i] for i in order),
        confidences=tuple(group.confidences[i] for i in order),
    )

    feature_maps = assign_global_ids(ordered)
    confidence = compute_confidence_map(ordered)
    mask = binarize_confidence_map(confidence, options.confidence_threshold)
    masked = mask_feature_maps(feature_maps, mask)
    vector_set = build_feature_vectors(masked)

    if options.k_override is not None:
        k_requested = options.k_override
    else:
        k_requested = select_cluster_count(ordered)

    # Fully-background vectors are already decided by the mask: they map to
    # consensus label 0 and stay out of the clustering.
    foreground_rows = np.flatnonzero((vector_set.vectors != 0).any(axis=1))
    n_foreground = foreground_rows.size

    row_labels = np.zeros(vector_set.n_distinct, dtype=LABEL_DTYPE)
    if n_foreground == 0:
        warnings.warn(
            "every pixel fell below the confidence threshold; "
            "consensus is all background",
            KClampedWarning,
            stacklevel=2,
        )
        model = None
        k_used = 0
    else:
        k_used = min(k_requested, n_foreground)
        if k_used < k_requested:
            warnings.warn(
                f"requested K={k_requested} exceeds the {n_foreground} distinct "
                f"foreground vectors; clamped to K={k_used}",
                KClampedWarning,
                stacklevel=2,
            )
        model = cluster_vectors(
            vector_set.vectors[foreground_rows],
            vector_set.counts[foreground_rows],
            k_used,
            init=options.init_method,
            max_iterations=options.max_iterations,
            seed=options.seed,
        )
        row_labels[foreground_rows] = model.assignment + 1

    consensus = normalize_labels(LabelMap(row_labels[vector_set.origin_index]))
    return FusionResult(
        consensus=consensus,
        model=model,
        confidence=confidence,
        mask=mask,
        vectors=vector_set,
        k_requested=k_requested,
        k_used=k_used,
        member_order=order,
    )


def fuse(group: SegmentationGroup, options: FusionOptions | None = None) -> LabelMap:
    """Fuse a group of segmentations into one consensus segmentation."""
    return run_fusion(group, options).consensus
