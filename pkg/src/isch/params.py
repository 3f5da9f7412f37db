"""Model hyperparameters shared across the training pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ModelParams:
    """Hyperparameters of the hashing model.

    The noise variance is never set directly; it is derived as
    ``sigma_sq = eta * tau``. Code length factorizes as
    ``bits_m = blocks_q * block_len``.
    """

    tau: float
    eta: float
    bits_m: int
    blocks_q: int = 1

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.eta <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.bits_m < 1:
            raise ValueError(f"bits_m must be positive, got {self.bits_m}")
        if self.blocks_q < 1:
            raise ValueError(f"blocks_q must be positive, got {self.blocks_q}")
        if self.bits_m % self.blocks_q != 0:
            raise ValueError(
                f"bits_m={self.bits_m} not divisible by blocks_q={self.blocks_q}"
            )

    @property
    def sigma_sq(self) -> float:
        return self.eta * self.tau

    @property
    def block_len(self) -> int:
        return self.bits_m // self.blocks_q


@dataclass(frozen=True)
class DictConfig:
    """Configuration for hierarchical dictionary learning.

    Level-2 branching is fixed at ``k2 = 2 * k1``. ``proxy_dim`` and
    ``min_split`` default to ``min(d, 256)`` and ``2 * k2`` when left unset
    (resolved against the data at fit time).
    """

    k1: int
    levels_h: int = 2
    proxy_dim: int | None = None
    min_split: int | None = None
    rng_seed: int = 0
    kmeans_iters: int = 25
    kmeans_tol: float = 1e-4

    def __post_init__(self):
        if self.k1 < 1:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if self.levels_h not in (1, 2):
            raise ValueError(f"levels_h must be 1 or 2, got {self.levels_h}")
        if self.proxy_dim is not None and self.proxy_dim < 1:
            raise ValueError("proxy_dim must be positive")
        if self.min_split is not None and self.min_split < 1:
            raise ValueError("min_split must be positive")
        if self.kmeans_iters < 1:
            raise ValueError("kmeans_iters must be positive")
        if self.kmeans_tol <= 0:
            raise ValueError("kmeans_tol must be positive")

    @property
    def k2(self) -> int:
        return 2 * self.k1

    def resolved_proxy_dim(self, d: int) -> int:
        return self.proxy_dim if self.proxy_dim is not None else min(d, 256)

    def resolved_min_split(self) -> int:
        return self.min_split if self.min_split is not None else 2 * self.k2
