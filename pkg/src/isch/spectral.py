"""Spectral dimensionality reduction from an overcomplete dictionary.

Builds the reduction matrix W whose rows are the leading singular vectors of
the dictionary, each scaled by an eigenvalue-dependent factor. For large d the
eigenproblem is approximated by projecting the dictionary onto the span of
sampled columns and solving Q independent small SVD subproblems, one per bit
block.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .params import ModelParams

# Relative singular-value cutoff below which a sampled column block is
# considered rank deficient and gets resampled.
RANK_TOL = 1e-10
MAX_RESAMPLES = 20


@dataclass
class SingularPair:
    """One singular value / left singular vector of the (projected) dictionary."""

    sigma_val: float
    vec: np.ndarray
    block_id: int

    @property
    def eigenvalue(self) -> float:
        """Eigenvalue of D Dᵀ associated with this pair (sigma squared)."""
        return self.sigma_val ** 2


@dataclass
class SpectralModel:
    pairs: list[SingularPair]
    W: np.ndarray


def f_lambda(lam: float, params: ModelParams) -> float:
    """Scaling applied to the eigenvector of eigenvalue ``lam``.

    Equals sqrt(4 tau^4 lam / (sigma^4 + 4 tau^2 sigma^2 lam + 4 tau^4 lam^2)),
    zero at lam=0 and maximized at lam = sigma^2 / (2 tau^2).
    """
    lam = np.asarray(lam, dtype=np.float64)
    t2 = params.tau ** 2
    s2 = params.sigma_sq
    num = 4.0 * t2 * t2 * lam
    den = s2 * s2 + 4.0 * t2 * s2 * lam + 4.0 * t2 * t2 * lam * lam
    out = np.sqrt(num / den)
    return float(out) if out.ndim == 0 else out


def exact_spectral(D: np.ndarray, m: int, params: ModelParams) -> SpectralModel:
    """Top-m singular pairs of D, computed by a dense SVD (reference path).

    Only intended for moderate d. Raises if rank(D) < m.
    """
    D = np.asarray(D, dtype=np.float64)
    d = D.shape[0]
    if m > d:
        raise ValueError(f"m={m} exceeds dictionary row dimension d={d}")
    U, s, _ = np.linalg.svd(D, full_matrices=False)
    if s[0] <= 0 or s[m - 1] / s[0] <= RANK_TOL:
        raise ValueError("insufficient rank: dictionary has fewer than m nonzero singular values")
    ell = params.block_len
    pairs = [
        SingularPair(sigma_val=float(s[i]), vec=U[:, i].copy(), block_id=i // ell)
        for i in range(m)
    ]
    return SpectralModel(pairs=pairs, W=assemble_W(pairs, params))


def sample_columns(
    D: np.ndarray, m: int, rng_seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw m distinct columns of D uniformly without replacement."""
    D = np.asarray(D)
    k = D.shape[1]
    if m > k:
        raise ValueError(f"sample larger than dictionary: m={m} > k={k}")
    rng = np.random.default_rng(rng_seed)
    indices = rng.choice(k, size=m, replace=False)
    return D[:, indices].astype(np.float64, copy=True), indices


def subproblem_pairs(
    C_i: np.ndarray,
    D: np.ndarray,
    params: ModelParams,
    resample: Callable[[], np.ndarray] | None = None,
    block_id: int = 0,
) -> list[SingularPair]:
    """Singular pairs of the projection of D onto the span of the block C_i.

    With C_i = U S Vᵀ, the projected matrix U Uᵀ D has the same nonzero
    singular values as A = Uᵀ D, and its left singular vectors are U U_A where
    A = U_A S_A V_Aᵀ. Rank-deficient blocks trigger ``resample`` (a callback
    returning a fresh d x l column block) up to 20 times.
    """
    D = np.asarray(D, dtype=np.float64)
    C_i = np.asarray(C_i, dtype=np.float64)
    for attempt in range(MAX_RESAMPLES + 1):
        U, s, _ = np.linalg.svd(C_i, full_matrices=False)
        if s[0] > 0 and s[-1] / s[0] > RANK_TOL:
            break
        if resample is None or attempt == MAX_RESAMPLES:
            raise RuntimeError("degenerate dictionary block")
        C_i = np.asarray(resample(), dtype=np.float64)
    A = U.T @ D
    U_A, s_A, _ = np.linalg.svd(A, full_matrices=False)
    vecs = U @ U_A
    return [
        SingularPair(sigma_val=float(s_A[j]), vec=vecs[:, j].copy(), block_id=block_id)
        for j in range(C_i.shape[1])
    ]


def assemble_W(pairs: Sequence[SingularPair], params: ModelParams) -> np.ndarray:
    """Stack scaled singular vectors into the m x d reduction matrix.

    Row i is f(sigma_i^2) * vec_i; rows keep their block grouping. Emits a
    warning when some rows carry a near-zero scale (those bits are noise
    dominated).
    """
    if len(pairs) != params.bits_m:
        raise ValueError(f"expected {params.bits_m} pairs, got {len(pairs)}")
    scales = np.array([f_lambda(p.eigenvalue, params) for p in pairs])
    W = np.stack([s * p.vec for s, p in zip(scales, pairs)])
    if scales.max() > 0 and scales.min() < 1e-3 * scales.max():
        warnings.warn(
            "some reduction rows have near-zero scale; the corresponding bits "
            "are noise dominated",
            RuntimeWarning,
            stacklevel=2,
        )
    return W


def cross_block_overlap(pairs: Sequence[SingularPair], blocks_q: int) -> np.ndarray:
    """Diagnostic: spectral norm of U_iᵀ U_j for each pair of blocks.

    Vectors within a block are orthonormal by construction; vectors from
    different blocks are not. Entry (i, j) close to 0 means blocks i and j are
    nearly orthogonal; the diagonal is 1.
    """
    groups = [
        np.stack([p.vec for p in pairs if p.block_id == b], axis=1)
        for b in range(blocks_q)
    ]
    out = np.zeros((blocks_q, blocks_q))
    for i in range(blocks_q):
        for j in range(blocks_q):
            out[i, j] = np.linalg.norm(groups[i].T @ groups[j], ord=2)
    return out
