"""Test-support tools: explicit lasso solving, generative sampling and
inner-product distortion measurement.

The production pipeline never solves a lasso; these routines exist so the
claim it rests on (reduced inner products tracking sparse-code inner products)
can be checked directly on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SparseModelSample:
    """Data drawn from the generative model x = D c + noise."""

    X: np.ndarray  # n x d
    C_true: np.ndarray  # n x k
    D: np.ndarray  # d x k
    tau: float
    sigma_sq: float


def lasso_cd(
    D: np.ndarray,
    x: np.ndarray,
    eta: float,
    max_iters: int = 100_000,
    tol: float = 1e-12,
    kkt_tol: float = 1e-8,
) -> np.ndarray:
    """Cyclic coordinate descent for min_c 0.5||x - Dc||^2 + eta ||c||_1.

    Assumes unit-norm atoms, so each coordinate update is a single
    soft-threshold step. Stops when the optimality-condition residual drops
    below ``kkt_tol`` or the largest coordinate update in a sweep falls below
    ``tol`` (step sizes alone can stall above the target accuracy on
    ill-conditioned overcomplete instances, hence the explicit check).
    """
    D = np.asarray(D, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    k = D.shape[1]
    c = np.zeros(k)
    r = x.copy()  # residual x - D c
    for _ in range(max_iters):
        max_step = 0.0
        for j in range(k):
            old = c[j]
            rho = D[:, j] @ r + old
            new = np.sign(rho) * max(abs(rho) - eta, 0.0)
            if new != old:
                r -= (new - old) * D[:, j]
                c[j] = new
                max_step = max(max_step, abs(new - old))
        if max_step < tol or kkt_residual(D, x, c, eta) < kkt_tol:
            break
    return c


def lasso_objective(D: np.ndarray, x: np.ndarray, c: np.ndarray, eta: float) -> float:
    return float(0.5 * np.sum((x - D @ c) ** 2) + eta * np.sum(np.abs(c)))


def kkt_residual(D: np.ndarray, x: np.ndarray, c: np.ndarray, eta: float) -> float:
    """Worst-case violation of the lasso optimality conditions.

    For each zero coordinate |d_jᵀ r| must not exceed eta; for each active one
    d_jᵀ r must equal eta * sign(c_j).
    """
    g = D.T @ (x - D @ c)
    zero = c == 0
    res = 0.0
    if zero.any():
        res = max(res, float(np.maximum(np.abs(g[zero]) - eta, 0.0).max()))
    if (~zero).any():
        res = max(res, float(np.abs(g[~zero] - eta * np.sign(c[~zero])).max()))
    return res


def generate_sparse_model_data(
    D: np.ndarray, n: int, tau: float, sigma_sq: float, seed: int
) -> SparseModelSample:
    """Sample n vectors with i.i.d. Laplace(tau) coefficients and Gaussian noise."""
    D = np.asarray(D, dtype=np.float64)
    d, k = D.shape
    rng = np.random.default_rng(seed)
    C = rng.laplace(scale=tau, size=(n, k))
    X = C @ D.T
    if sigma_sq > 0:
        X = X + rng.normal(scale=np.sqrt(sigma_sq), size=(n, d))
    return SparseModelSample(X=X, C_true=C, D=D, tau=tau, sigma_sq=sigma_sq)


def inner_product_distortion(
    L: np.ndarray, sample: SparseModelSample, eta: float
) -> float:
    """Mean squared gap between sparse-code and reduced inner products.

    Solves the lasso for every sample vector, then averages
    (c_iᵀc_j - (Lx_i)ᵀ(Lx_j))^2 over all pairs i < j.
    """
    L = np.asarray(L, dtype=np.float64)
    X = sample.X
    C_hat = np.stack([lasso_cd(sample.D, x, eta) for x in X])
    Y = X @ L.T
    G_c = C_hat @ C_hat.T
    G_y = Y @ Y.T
    diff2 = (G_c - G_y) ** 2
    n = X.shape[0]
    iu = np.triu_indices(n, k=1)
    return float(diff2[iu].mean())
