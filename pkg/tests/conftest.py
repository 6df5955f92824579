"""Shared generators for the test suite.

Random segmentations come from a Voronoi construction (labels = nearest of a
few seed points), which produces the compact, connected regions real
annotations have; ``speckle_map`` gives the adversarial opposite.  Groups of
correlated members are built by jittering one set of seed points per member,
mimicking annotators who agree on structure but disagree on boundaries.

Everything takes an explicit ``numpy.random.Generator`` so each test pins
its own seed.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from segfuse import LabelMap, SegmentationGroup, normalize_labels, write_seg


def rand_label_map(rng, shape=(10, 14), regions=5) -> LabelMap:
    """Voronoi-style random segmentation with up to ``regions`` regions."""
    height, width = shape
    points = rng.uniform(0.0, 1.0, size=(regions, 2)) * (height, width)
    yy, xx = np.mgrid[0:height, 0:width]
    squared = (yy[..., None] - points[:, 0]) ** 2 + (xx[..., None] - points[:, 1]) ** 2
    return normalize_labels(LabelMap(squared.argmin(axis=-1) + 1))


def speckle_map(rng, shape=(8, 8), labels=4) -> LabelMap:
    """Independent uniform labels per pixel (fragmented worst case)."""
    return LabelMap(rng.integers(1, labels + 1, size=shape))


def rand_group(
    rng,
    members=3,
    shape=(12, 16),
    regions=4,
    jitter=1.0,
    confidences=None,
    image_id="image",
) -> SegmentationGroup:
    """Correlated random annotations: one Voronoi layout, jittered per member."""
    height, width = shape
    points = rng.uniform(0.0, 1.0, size=(regions, 2)) * (height, width)
    yy, xx = np.mgrid[0:height, 0:width]
    maps = []
    for _ in range(members):
        moved = points + rng.normal(0.0, jitter, size=points.shape)
        squared = (yy[..., None] - moved[:, 0]) ** 2 + (xx[..., None] - moved[:, 1]) ** 2
        maps.append(normalize_labels(LabelMap(squared.argmin(axis=-1) + 1)))
    if confidences is None:
        confidences = (1.0,) * members
    return SegmentationGroup(
        image_id=image_id, members=tuple(maps), confidences=tuple(confidences)
    )


def permute_labels(rng, label_map: LabelMap) -> LabelMap:
    """Randomly rename the non-zero labels (same partition, new names)."""
    values = np.unique(label_map.labels)
    nonzero = values[values != 0]
    renamed = rng.permutation(len(nonzero)) + 1
    lookup = np.zeros(int(values.max()) + 1, dtype=np.int64)
    lookup[nonzero] = renamed
    return LabelMap(lookup[label_map.labels])


def refine_map(rng, label_map: LabelMap) -> LabelMap:
    """Split every region of the map randomly in two (a strict refinement)."""
    coin = rng.integers(0, 2, size=label_map.shape)
    split = label_map.labels.astype(np.int64) * 2 + coin
    split[label_map.labels == 0] = 0
    return normalize_labels(LabelMap(split))


def build_seg_dataset(
    root: Path, rng, images=5, members=4, shape=(20, 26), max_regions=6
) -> list[str]:
    """Write a synthetic `.seg` dataset directory; returns the image ids."""
    image_ids = []
    for index in range(images):
        image_id = f"img{index:03d}"
        directory = Path(root) / image_id
        directory.mkdir(parents=True)
        regions = int(rng.integers(3, max_regions + 1))
        group = rand_group(
            rng, members=members, shape=shape, regions=regions, image_id=image_id
        )
        for j, member in enumerate(group.members):
            (directory / f"seg_{j}.seg").write_bytes(write_seg(member))
        image_ids.append(image_id)
    return image_ids
