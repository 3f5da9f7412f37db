"""Overcomplete dictionary learning by hierarchical k-means over random-projection proxies.

Clustering runs on low-dimensional projections of the (zero-centered) data to
keep the cost manageable; the atoms themselves are cluster means taken in the
original space, then normalized to unit length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DictConfig


@dataclass
class Dictionary:
    atoms: np.ndarray  # d x k, unit-norm columns
    source_mean: np.ndarray  # d-vector removed before clustering

    @property
    def k(self) -> int:
        return self.atoms.shape[1]


def zero_center(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Remove the column mean; returns (centered matrix, removed mean)."""
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    return X - mean, mean


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding."""
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    idx = int(rng.integers(n))
    centers[0] = X[idx]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[j]) ** 2, axis=1))
    return centers


def _assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center labels and squared distances."""
    # ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2; row-wise argmin
    cross = X @ centers.T
    cn = np.sum(centers ** 2, axis=1)
    scores = cn[None, :] - 2.0 * cross
    labels = np.argmin(scores, axis=1)
    xn = np.sum(X ** 2, axis=1)
    d2 = xn + scores[np.arange(X.shape[0]), labels]
    return labels, np.maximum(d2, 0.0)


def _lloyd(
    X: np.ndarray,
    k: int,
    rng: np.random.Generator,
    iters: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations with k-means++ seeding.

    Empty clusters are refilled with the point currently farthest from its
    center. Returns (centers, labels, per-iteration objective history); the
    history is non-increasing.
    """
    n = X.shape[0]
    if n < k:
        raise ValueError(f"too few points: n={n} < k={k}")
    centers = _kmeans_pp_init(X, k, rng)
    labels, d2 = _assign(X, centers)
    history = [float(d2.sum())]
    for _ in range(iters):
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(d2))
                centers[j] = X[far]
                labels[far] = j
                d2[far] = 0.0
        labels, d2 = _assign(X, centers)
        obj = float(d2.sum())
        prev = history[-1]
        history.append(obj)
        if prev - obj <= tol * max(prev, 1e-300):
            break
    return centers, labels, history


def kmeans(X: np.ndarray, k: int, cfg: DictConfig) -> np.ndarray:
    """Cluster rows of X into k centers (seeded by cfg.rng_seed)."""
    X = np.asarray(X, dtype=np.float64)
    rng = np.random.default_rng(cfg.rng_seed)
    centers, _, _ = _lloyd(X, k, rng, cfg.kmeans_iters, cfg.kmeans_tol)
    return centers


def kmeans_full(
    X: np.ndarray, k: int, cfg: DictConfig
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Like :func:`kmeans` but also returns labels and the objective history."""
    X = np.asarray(X, dtype=np.float64)
    rng = np.random.default_rng(cfg.rng_seed)
    return _lloyd(X, k, rng, cfg.kmeans_iters, cfg.kmeans_tol)


def hierarchical_dictionary(X: np.ndarray, cfg: DictConfig) -> Dictionary:
    """Two-level hierarchical clustering producing at most k1(1+2*k1) atoms.

    Level 1 splits the data into k1 clusters; level 2 splits each sufficiently
    large level-1 cluster into k2 = 2*k1 subclusters. Each level clusters
    Gaussian random projections of the centered data (one shared projection
    per level); centers from every level, computed in the original space, are
    collected and unit-normalized.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n < cfg.k1:
        raise ValueError(f"too few points: n={n} < k1={cfg.k1}")
    Xc, mean = zero_center(X)
    proxy_dim = cfg.resolved_proxy_dim(d)
    min_split = cfg.resolved_min_split()
    rng = np.random.default_rng(cfg.rng_seed)

    projections = [
        rng.normal(0.0, 1.0 / np.sqrt(proxy_dim), size=(d, proxy_dim))
        for _ in range(cfg.levels_h)
    ]

    Y1 = Xc @ projections[0]
    _, labels1, _ = _lloyd(Y1, cfg.k1, rng, cfg.kmeans_iters, cfg.kmeans_tol)

    # Pre-draw one sub-seed per level-1 cluster so atom order and values do
    # not depend on the iteration order of the level-2 loop.
    sub_seeds = rng.integers(0, 2 ** 63, size=cfg.k1)

    atoms: list[np.ndarray] = []
    Y2 = Xc @ projections[1] if cfg.levels_h >= 2 else None
    for c in range(cfg.k1):
        member_idx = np.flatnonzero(labels1 == c)
        if member_idx.size == 0:
            continue
        atoms.append(Xc[member_idx].mean(axis=0))
        if (
            Y2 is not None
            and member_idx.size >= max(min_split, cfg.k2)
        ):
            sub_rng = np.random.default_rng(int(sub_seeds[c]))
            _, labels2, _ = _lloyd(
                Y2[member_idx], cfg.k2, sub_rng, cfg.kmeans_iters, cfg.kmeans_tol
            )
            for s in range(cfg.k2):
                sub = member_idx[labels2 == s]
                if sub.size:
                    atoms.append(Xc[sub].mean(axis=0))

    A = np.stack(atoms, axis=1)
    norms = np.linalg.norm(A, axis=0)
    keep = norms > 1e-12
    A = A[:, keep] / norms[keep]
    return Dictionary(atoms=A, source_mean=mean)
