"""Exhaustive Hamming retrieval over packed codes and retrieval metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codes import BinaryCodeSet


@dataclass
class RetrievalResult:
    query_id: int
    ranked_ids: np.ndarray  # database indices, best first
    distances: np.ndarray  # matching Hamming distances, non-decreasing


def hamming(a: np.ndarray, b: np.ndarray, m: int) -> int:
    """Number of differing bits between two packed codes of m bits.

    Pad bits are guaranteed zero by the packing layout, so a plain XOR +
    popcount over the words is exact.
    """
    a = np.asarray(a, dtype=np.uint64).ravel()
    b = np.asarray(b, dtype=np.uint64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"code length mismatch: {a.shape} vs {b.shape}")
    return int(np.bitwise_count(a ^ b).sum())


def hamming_to_all(db: BinaryCodeSet, query: np.ndarray) -> np.ndarray:
    """Hamming distance from one packed query code to every database code."""
    query = np.asarray(query, dtype=np.uint64).ravel()
    if query.shape[0] != db.words.shape[1]:
        raise ValueError("code length mismatch between query and database")
    return np.bitwise_count(db.words ^ query[None, :]).sum(axis=1).astype(np.int64)


def top_k(
    db: BinaryCodeSet, query: np.ndarray, k: int, query_id: int = 0
) -> RetrievalResult:
    """The k database codes nearest to the query; ties break by ascending index."""
    if k > db.n:
        raise ValueError(f"k={k} exceeds database size n={db.n}")
    if k < 1:
        raise ValueError("k must be positive")
    dists = hamming_to_all(db, query)
    # Stable sort on distance keeps equal-distance items in index order.
    order = np.argsort(dists, kind="stable")[:k]
    return RetrievalResult(
        query_id=query_id, ranked_ids=order, distances=dists[order]
    )


def precision_at_k(
    result: RetrievalResult,
    db_labels: np.ndarray,
    query_label: int,
    k: int,
) -> float:
    """Fraction of the first k retrieved items sharing the query's label."""
    if k > len(result.ranked_ids):
        raise ValueError("k exceeds the number of ranked items")
    top = result.ranked_ids[:k]
    return float(np.mean(np.asarray(db_labels)[top] == query_label))


def average_precision(result: RetrievalResult, relevant: Iterable[int]) -> float:
    """AP over a full ranking: mean of precision at each relevant hit position."""
    relevant = set(relevant)
    if not relevant:
        raise ValueError("undefined AP: query has no relevant items")
    hits = 0
    total = 0.0
    for pos, db_id in enumerate(result.ranked_ids, start=1):
        if int(db_id) in relevant:
            hits += 1
            total += hits / pos
    return total / len(relevant)


def mean_average_precision(
    results: Sequence[RetrievalResult], relevant: Sequence[Iterable[int]]
) -> float:
    """Mean AP over queries; ``relevant[i]`` is the relevant-id set of results[i]."""
    if len(results) != len(relevant):
        raise ValueError("results and relevant sets must align")
    return float(np.mean([average_precision(r, s) for r, s in zip(results, relevant)]))
