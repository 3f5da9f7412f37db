"""Block-diagonal rotation fitting by alternating sign quantization and Procrustes.

The full m x m rotation is constrained to Q orthogonal diagonal blocks of
size l x l, so each block is optimized independently against its segment of
the reduced training vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SWEEPS = 50
REL_TOL = 1e-4
ORTHO_TOL = 1e-6


def _sign_pm1(Z: np.ndarray) -> np.ndarray:
    """Elementwise sign into {-1,+1} with sign(0) = +1."""
    return np.where(Z >= 0, 1.0, -1.0)


def quantization_error(Z_j: np.ndarray, R_j: np.ndarray) -> float:
    """Total squared distance between rotated vectors and their signed codes."""
    V = Z_j @ R_j
    return float(np.sum((_sign_pm1(V) - V) ** 2))


def random_rotation(ell: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random orthogonal matrix via QR of a Gaussian."""
    Q, R = np.linalg.qr(rng.normal(size=(ell, ell)))
    return Q * np.sign(np.diag(R))


def optimize_block_rotation(
    Z_j: np.ndarray, iters: int = DEFAULT_SWEEPS, rng_seed: int = 0
) -> tuple[np.ndarray, list[float]]:
    """Minimize quantization error of one block by alternating optimization.

    Starting from a seeded random rotation, each sweep sets the codes
    B = sign(Z R) and then solves the orthogonal Procrustes problem
    Zᵀ B = U S Vᵀ, R = U Vᵀ. Returns the final rotation and the per-sweep
    error history (non-increasing); stops early when the relative error
    change drops below 1e-4.
    """
    Z_j = np.asarray(Z_j, dtype=np.float64)
    ell = Z_j.shape[1]
    rng = np.random.default_rng(rng_seed)
    R = random_rotation(ell, rng)
    history = [quantization_error(Z_j, R)]
    for _ in range(iters):
        B = _sign_pm1(Z_j @ R)
        U, _, Vt = np.linalg.svd(Z_j.T @ B)
        R = U @ Vt
        err = quantization_error(Z_j, R)
        prev = history[-1]
        history.append(err)
        if prev - err <= REL_TOL * max(prev, 1e-300):
            break
    return R, history


@dataclass
class RotationModel:
    """Q orthogonal blocks forming an implicit block-diagonal m x m rotation."""

    blocks: list[np.ndarray]

    @property
    def blocks_q(self) -> int:
        return len(self.blocks)

    @property
    def block_len(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def bits_m(self) -> int:
        return self.blocks_q * self.block_len

    def apply(self, Y: np.ndarray) -> np.ndarray:
        """Apply R_jᵀ to each length-l segment of the input vector(s).

        Accepts a single m-vector or an (n, m) matrix of row vectors.
        """
        Y = np.asarray(Y, dtype=np.float64)
        single = Y.ndim == 1
        Y2 = Y[None, :] if single else Y
        if Y2.shape[1] != self.bits_m:
            raise ValueError(f"expected {self.bits_m} components, got {Y2.shape[1]}")
        ell = self.block_len
        out = np.empty_like(Y2)
        for j, R in enumerate(self.blocks):
            out[:, j * ell : (j + 1) * ell] = Y2[:, j * ell : (j + 1) * ell] @ R
        return out[0] if single else out

    def apply_transpose(self, Y: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`apply` (applies R_j to each segment)."""
        Y = np.asarray(Y, dtype=np.float64)
        single = Y.ndim == 1
        Y2 = Y[None, :] if single else Y
        ell = self.block_len
        out = np.empty_like(Y2)
        for j, R in enumerate(self.blocks):
            out[:, j * ell : (j + 1) * ell] = Y2[:, j * ell : (j + 1) * ell] @ R.T
        return out[0] if single else out


def assemble_rotation(block_list: list[np.ndarray]) -> RotationModel:
    """Validate orthogonality of each block and wrap them into a model."""
    if not block_list:
        raise ValueError("need at least one rotation block")
    blocks = []
    ell = np.asarray(block_list[0]).shape[0]
    for R in block_list:
        R = np.asarray(R, dtype=np.float64)
        if R.shape != (ell, ell):
            raise ValueError("rotation blocks must share one square shape")
        if np.abs(R.T @ R - np.eye(ell)).max() >= ORTHO_TOL:
            raise ValueError("invalid rotation block")
        blocks.append(R)
    return RotationModel(blocks=blocks)
