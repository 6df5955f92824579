"""Deterministic batch K-Modes clustering over weighted categorical vectors.

K-Modes (Huang, 1997/1998) is the K-Means analogue for categorical data:
distances are simple-matching dissimilarities (count of differing attributes)
and centroids are per-attribute modes.  This implementation works on a
*deduplicated* vector set -- each distinct vector carries a multiplicity --
which is mathematically identical to clustering the expanded multiset but far
cheaper when many pixels share a vector.

Two deterministic seeding strategies are provided besides seeded-random
selection:

* ``VECTOR_DENSITY`` -- take the k distinct vectors with the largest
  multiplicity.  Centers then sit on the pixel populations that whole groups
  of annotators already agree on, leaving only disputed pixels to iterate.
* ``ATTRIBUTE_DENSITY`` -- the density/distance seeding of Cao et al. (2009):
  the first center maximizes summed per-attribute frequency, each next center
  maximizes density times distance to the closest already-chosen center.

The whole procedure is a pure function of its inputs: batch (all-assign,
then-all-update) iteration, with every tie broken by a fixed rule
(assignment ties to the lowest cluster index, per-attribute mode ties to the
smallest value, ranking ties to the lexicographically smaller vector), so
identical inputs give bit-identical models.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .types import LABEL_DTYPE, ClusterModel, FeatureVectorSet


class InitMethod(str, Enum):
    """Seeding strategies for the initial modes."""

    VECTOR_DENSITY = "vector_density"
    ATTRIBUTE_DENSITY = "attribute_density"
    RANDOM = "random"


def dissimilarity(x, y) -> int:
    """Simple-matching dissimilarity: number of positions where x and y differ."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"arity mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


def mode_of(vectors, counts, member_indices) -> np.ndarray:
    """Per-attribute weighted mode of a subset of vectors.

    For each attribute the value with the largest total multiplicity wins;
    ties go to the smallest value.
    """
    vectors = np.asarray(vectors)
    counts = np.asarray(counts, dtype=np.int64)
    member_indices = np.asarray(member_indices, dtype=np.int64)
    if member_indices.size == 0:
        raise ValueError("cannot take the mode of an empty subset")
    sub = vectors[member_indices]
    w = counts[member_indices]
    out = np.empty(vectors.shape[1], dtype=LABEL_DTYPE)
    for j in range(vectors.shape[1]):
        values, inverse = np.unique(sub[:, j], return_inverse=True)
        freq = np.bincount(inverse, weights=w)
        # np.unique sorts ascending and argmax returns the first maximum,
        # so ties resolve to the smallest value.
        out[j] = values[np.argmax(freq)]
    return out


def _lex_rank(vectors: np.ndarray) -> np.ndarray:
    """Rank of each row in lexicographic row order (0 = smallest)."""
    order = np.lexsort(tuple(vectors[:, j] for j in reversed(range(vectors.shape[1]))))
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    return rank


def _argbest(score: np.ndarray, eligible: np.ndarray, lex_rank: np.ndarray) -> int:
    """Index of the eligible row with maximal score, ties to smaller lex rank."""
    masked = np.where(eligible, score, -1)
    best = masked.max()
    candidates = np.flatnonzero(masked == best)
    return int(candidates[np.argmin(lex_rank[candidates])])


def _check_k(k: int, n_distinct: int):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n_distinct:
        raise ValueError(
            f"k = {k} exceeds the number of distinct vectors ({n_distinct})"
        )


def init_vector_density(vector_set: FeatureVectorSet, k: int) -> np.ndarray:
    """The k distinct vectors with the largest multiplicity, as initial modes."""
    return _init_vector_density(vector_set.vectors, vector_set.counts, k)


def _init_vector_density(vectors: np.ndarray, counts: np.ndarray, k: int) -> np.ndarray:
    _check_k(k, len(vectors))
    # Primary key: multiplicity descending; ties: lexicographically smaller row.
    keys = tuple(vectors[:, j] for j in reversed(range(vectors.shape[1]))) + (-counts,)
    order = np.lexsort(keys)
    return vectors[order[:k]].copy()


def init_attribute_density(vector_set: FeatureVectorSet, k: int) -> np.ndarray:
    """Density/distance seeding after Cao et al. (2009).

    density(x) = (1 / (n * arity)) * sum_j |pixels whose attribute j equals
    x_j|, with n the total pixel weight.  The first center maximizes density;
    every next center maximizes density(x) * min distance to chosen centers.
    """
    return _init_attribute_density(vector_set.vectors, vector_set.counts, k)


def _init_attribute_density(vectors: np.ndarray, counts: np.ndarray, k: int) -> np.ndarray:
    _check_k(k, len(vectors))
    n, arity = vectors.shape
    # Integer density surrogate: sum over attributes of the weighted frequency
    # of the vector's value there.  The 1/(n*arity) scale is constant, so
    # argmax comparisons stay exact in integers.
    density = np.zeros(n, dtype=np.int64)
    for j in range(arity):
        values, inverse = np.unique(vectors[:, j], return_inverse=True)
        freq = np.bincount(inverse, weights=counts).astype(np.int64)
        density += freq[inverse]

    lex = _lex_rank(vectors)
    unchosen = np.ones(n, dtype=bool)
    chosen: list[int] = []
    first = _argbest(density, unchosen, lex)
    chosen.append(first)
    unchosen[first] = False
    min_dist = (vectors != vectors[first]).sum(axis=1).astype(np.int64)
    while len(chosen) < k:
        nxt = _argbest(density * min_dist, unchosen, lex)
        chosen.append(nxt)
        unchosen[nxt] = False
        np.minimum(min_dist, (vectors != vectors[nxt]).sum(axis=1), out=min_dist)
    return vectors[chosen].copy()


def _init_random(vectors: np.ndarray, k: int, seed) -> np.ndarray:
    _check_k(k, len(vectors))
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(vectors), size=k, replace=False)
    return vectors[picked].copy()


def _pairwise_dissim(vectors: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """(n_vectors, k) matrix of simple-matching dissimilarities."""
    return (vectors[:, None, :] != modes[None, :, :]).sum(axis=2)


def _repair_empty(assignment, dism, counts, k, lex) -> np.ndarray:
    """Give each empty cluster the worst-fit heaviest vector.

    Score = multiplicity * dissimilarity to the vector's current mode; ties
    go to the lexicographically smaller vector.  A vector seized once is
    pinned for the rest of the pass, so chains of seizures terminate.  A
    cluster no eligible vector can fill (all remaining scores zero) stays
    empty.
    """
    assignment = assignment.copy()
    pinned = np.zeros(len(assignment), dtype=bool)
    while True:
        sizes = np.bincount(assignment, minlength=k)
        empties = np.flatnonzero(sizes == 0)
        if empties.size == 0:
            return assignment
        score = counts * dism[np.arange(len(assignment)), assignment]
        score[pinned] = -1
        if score.max() <= 0:
            return assignment
        victim = _argbest(score, ~pinned, lex)
        assignment[victim] = empties[0]
        pinned[victim] = True


def _weighted_cost(vectors, counts, modes, assignment) -> int:
    d = (vectors != modes[assignment]).sum(axis=1)
    return int(np.sum(counts * d))


def cluster(
    vector_set: FeatureVectorSet,
    k: int,
    init: InitMethod = InitMethod.VECTOR_DENSITY,
    max_iterations: int = 100,
    seed: int | None = None,
) -> ClusterModel:
    """Batch K-Modes over all distinct vectors of ``vector_set``."""
    return cluster_vectors(
        vector_set.vectors, vector_set.counts, k,
        init=init, max_iterations=max_iterations, seed=seed,
    )


def cluster_vectors(
    vectors,
    counts,
    k: int,
    init: InitMethod = InitMethod.VECTOR_DENSITY,
    max_iterations: int = 100,
    seed: int | None = None,
) -> ClusterModel:
    """Batch K-Modes over an explicit (vectors, counts) table.

    Iterates assign-all / update-all until the assignment reaches a fixed
    point or ``max_iterations`` is hit.  The categorical cost is integral, so
    convergence needs no tolerance.  Empty clusters are repaired after each
    assignment step (see ``_repair_empty``).
    """
    vectors = np.ascontiguousarray(np.asarray(vectors), dtype=LABEL_DTYPE)
    counts = np.ascontiguousarray(np.asarray(counts), dtype=np.int64)
    if vectors.ndim != 2:
        raise ValueError("vectors must be 2-D (n, arity)")
    if counts.shape != (vectors.shape[0],):
        raise ValueError("counts must have one entry per vector")
    _check_k(k, len(vectors))
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")

    if init == InitMethod.VECTOR_DENSITY:
        modes = _init_vector_density(vectors, counts, k)
    elif init == InitMethod.ATTRIBUTE_DENSITY:
        modes = _init_attribute_density(vectors, counts, k)
    elif init == InitMethod.RANDOM:
        modes = _init_random(vectors, k, seed)
    else:
        raise ValueError(f"unknown init method: {init!r}")

    lex = _lex_rank(vectors)
    previous = None
    history: list[int] = []
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        dism = _pairwise_dissim(vectors, modes)
        assignment = np.argmin(dism, axis=1)  # ties to the lowest index
        assignment = _repair_empty(assignment, dism, counts, k, lex)
        if previous is not None and np.array_equal(assignment, previous):
            # modes already reflect this assignment; nothing moved
            history.append(_weighted_cost(vectors, counts, modes, assignment))
            break
        for c in range(k):
            members = np.flatnonzero(assignment == c)
            if members.size:
                modes[c] = mode_of(vectors, counts, members)
            # an unrepairable empty cluster keeps its stale mode
        history.append(_weighted_cost(vectors, counts, modes, assignment))
        previous = assignment

    return ClusterModel(
        modes=modes,
        assignment=assignment,
        iterations=iterations,
        cost=history[-1],
        cost_history=tuple(history),
    )
