"""Training pipelines producing hash models, and batch encoding to packed codes.

The main pipeline learns a dictionary, reduces dimension through its spectrum
and fits a block rotation; random-projection (LSH) and PCA+rotation (ITQ)
baselines share the same model type, encoder and search stack so comparisons
isolate the projection.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codes import BinaryCodeSet
from .dictionary import hierarchical_dictionary, zero_center
from .params import DictConfig, ModelParams
from .rotation import assemble_rotation, optimize_block_rotation
from .spectral import assemble_W, cross_block_overlap, sample_columns, subproblem_pairs

METHOD_ISCH = "isch"
METHOD_LSH = "lsh"
METHOD_ITQ = "itq"


@dataclass
class HashModel:
    """Trained hashing model: a linear projection plus the centering mean.

    Immutable after construction; arrays are marked read-only.
    """

    method: str
    projection: np.ndarray  # m x d
    mean: np.ndarray  # d
    params: ModelParams | None = None
    dict_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.projection = np.ascontiguousarray(self.projection, dtype=np.float64)
        self.mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        self.projection.flags.writeable = False
        self.mean.flags.writeable = False

    @property
    def bits_m(self) -> int:
        return self.projection.shape[0]

    @property
    def dim(self) -> int:
        return self.projection.shape[1]


def encode_batch(model: HashModel, X: np.ndarray) -> BinaryCodeSet:
    """Sign-threshold encoding: bit i = 1 iff row i of the projection has a
    nonnegative inner product with the centered vector."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.dim:
        raise ValueError(
            f"dimension mismatch: model expects d={model.dim}, got {X.shape[1]}"
        )
    scores = (X - model.mean) @ model.projection.T
    return BinaryCodeSet.from_bits(scores >= 0)


def _derived_seed(seed: int, *key: int) -> int:
    """Deterministic child seed for an independent pipeline stage."""
    return int(np.random.SeedSequence([seed & (2**63 - 1), *key]).generate_state(1)[0])


def train_isch(
    X: np.ndarray,
    params: ModelParams,
    dict_cfg: DictConfig,
    seed: int,
    rotation_iters: int = 50,
    threads: int = 1,
) -> HashModel:
    """Full training pipeline: dictionary -> spectral blocks -> rotation.

    Deterministic given (X, params, dict_cfg, seed), including when block
    subproblems run on multiple threads.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need an (n, d) training matrix with n >= 2")
    n, d = X.shape
    m, Q, ell = params.bits_m, params.blocks_q, params.block_len

    dictionary = hierarchical_dictionary(X, dict_cfg)
    D = dictionary.atoms
    k = dictionary.k
    if k < m:
        raise ValueError(f"code longer than dictionary: m={m} > k={k}")
    if k <= d:
        warnings.warn(
            f"dictionary is not overcomplete (k={k} <= d={d}); proceeding anyway",
            RuntimeWarning,
            stacklevel=2,
        )

    C, indices = sample_columns(D, m, _derived_seed(seed, 0))
    used = set(int(i) for i in indices)
    resample_rng = np.random.default_rng(_derived_seed(seed, 1))

    def resample():
        pool = np.array([i for i in range(k) if i not in used])
        if pool.size < ell:
            raise RuntimeError("degenerate dictionary block")
        fresh = resample_rng.choice(pool, size=ell, replace=False)
        used.update(int(i) for i in fresh)
        return D[:, fresh]

    def solve_block(j: int):
        C_j = C[:, j * ell : (j + 1) * ell]
        return subproblem_pairs(C_j, D, params, resample=resample, block_id=j)

    # Resampling mutates the shared index pool, so blocks run sequentially
    # here; the thread pool is reserved for the rotation stage below.
    pairs = []
    for j in range(Q):
        pairs.extend(solve_block(j))

    W = assemble_W(pairs, params)
    Z = (X - dictionary.source_mean) @ W.T

    def solve_rotation(j: int):
        return optimize_block_rotation(
            Z[:, j * ell : (j + 1) * ell],
            iters=rotation_iters,
            rng_seed=_derived_seed(seed, 2, j),
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rot_out = list(pool.map(solve_rotation, range(Q)))
    else:
        rot_out = [solve_rotation(j) for j in range(Q)]
    rotation = assemble_rotation([R for R, _ in rot_out])

    projection = np.empty_like(W)
    for j, R in enumerate(rotation.blocks):
        projection[j * ell : (j + 1) * ell] = R.T @ W[j * ell : (j + 1) * ell]

    overlap = cross_block_overlap(pairs, Q)
    meta = {
        "k": k,
        "k1": dict_cfg.k1,
        "seed": int(seed),
        "dict_seed": int(dict_cfg.rng_seed),
        "singular_values": [p.sigma_val for p in pairs],
        "block_final_error": [float(hist[-1]) for _, hist in rot_out],
        "max_cross_block_overlap": float(
            overlap[~np.eye(Q, dtype=bool)].max() if Q > 1 else 0.0
        ),
    }
    return HashModel(
        method=METHOD_ISCH,
        projection=projection,
        mean=dictionary.source_mean,
        params=params,
        dict_meta=meta,
    )


def train_lsh(X: np.ndarray, m: int, seed: int) -> HashModel:
    """Random-projection baseline: i.i.d. Gaussian rows, mean from the data.

    Rows are deliberately left unnormalized; sign thresholding is invariant to
    positive row scaling.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = X.shape[1]
    rng = np.random.default_rng(seed)
    projection = rng.normal(size=(m, d))
    return HashModel(
        method=METHOD_LSH,
        projection=projection,
        mean=X.mean(axis=0),
        dict_meta={"seed": int(seed)},
    )


def train_itq(
    X: np.ndarray, m: int, seed: int, rotation_iters: int = 50
) -> HashModel:
    """PCA + full-rotation baseline; feasible only for moderate d."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    if m > d:
        raise ValueError(f"m={m} exceeds data dimension d={d}")
    Xc, mean = zero_center(X)
    cov = (Xc.T @ Xc) / max(n - 1, 1)
    evals, evecs = np.linalg.eigh(cov)
    V = evecs[:, np.argsort(evals)[::-1][:m]]  # d x m, top variance first
    Z = Xc @ V
    R, _ = optimize_block_rotation(Z, iters=rotation_iters, rng_seed=seed)
    return HashModel(
        method=METHOD_ITQ,
        projection=(V @ R).T,
        mean=mean,
        dict_meta={"seed": int(seed)},
    )
