import numpy as np
import pytest

from isch.oracle import (
    generate_sparse_model_data,
    inner_product_distortion,
    kkt_residual,
    lasso_cd,
    lasso_objective,
)


def random_dictionary(d, k, seed):
    D = np.random.default_rng(seed).normal(size=(d, k))
    return D / np.linalg.norm(D, axis=0)


class TestLassoCd:
    def test_zero_solution_condition(self):
        D = random_dictionary(8, 16, 0)
        x = np.random.default_rng(1).normal(size=8)
        eta = np.abs(D.T @ x).max() * 1.001
        c = lasso_cd(D, x, eta)
        assert np.all(c == 0)

    def test_single_atom_recovery(self):
        D = random_dictionary(16, 16, 2)
        j = 5
        c = lasso_cd(D, D[:, j], eta=0.01)
        assert abs(c[j] - (1 - 0.01)) < 0.05
        others = np.delete(np.abs(c), j)
        assert others.max() < 0.05
        assert np.argmax(np.abs(c)) == j

    def test_matches_sklearn(self):
        sklearn = pytest.importorskip("sklearn.linear_model")
        for seed in range(5):
            D = random_dictionary(16, 24, seed)
            x = np.random.default_rng(100 + seed).normal(size=16)
            eta = 0.05
            c = lasso_cd(D, x, eta)
            # sklearn minimizes (1/2n)||x-Dc||^2 + alpha||c||_1
            ref = sklearn.Lasso(alpha=eta / 16, fit_intercept=False,
                                max_iter=50000, tol=1e-12).fit(D, x).coef_
            np.testing.assert_allclose(c, ref, atol=1e-5)

    def test_objective_non_increasing_over_sweeps(self):
        D = random_dictionary(12, 20, 3)
        x = np.random.default_rng(4).normal(size=12)
        eta = 0.05
        objs = []
        # rerun with increasing sweep budgets; the objective cannot go up
        for iters in (1, 2, 4, 8, 16):
            c = lasso_cd(D, x, eta, max_iters=iters)
            objs.append(lasso_objective(D, x, c, eta))
        assert np.all(np.diff(objs) <= 1e-12)

    def test_kkt_residuals(self):
        for seed in range(10):
            d = 8 + (seed % 3) * 8
            k = 2 * d
            D = random_dictionary(d, k, seed)
            x = np.random.default_rng(200 + seed).normal(size=d)
            c = lasso_cd(D, x, 0.05)
            assert kkt_residual(D, x, c, 0.05) < 1e-6


class TestGenerateSparseModelData:
    def test_tiny_tau_degenerates(self):
        D = random_dictionary(8, 16, 5)
        sample = generate_sparse_model_data(D, 50, tau=1e-12, sigma_sq=1.0, seed=0)
        assert np.abs(sample.C_true).max() < 1e-9

    def test_laplace_mean_abs(self):
        D = random_dictionary(2, 4, 6)
        tau = 0.7
        sample = generate_sparse_model_data(D, 250_000, tau=tau, sigma_sq=0.01,
                                            seed=1)
        assert np.abs(sample.C_true).mean() == pytest.approx(tau, rel=0.01)

    def test_noiseless(self):
        D = random_dictionary(8, 16, 7)
        sample = generate_sparse_model_data(D, 20, tau=0.5, sigma_sq=0.0, seed=2)
        np.testing.assert_allclose(sample.X, sample.C_true @ D.T)

    def test_deterministic(self):
        D = random_dictionary(8, 16, 8)
        s1 = generate_sparse_model_data(D, 10, 0.5, 0.01, seed=3)
        s2 = generate_sparse_model_data(D, 10, 0.5, 0.01, seed=3)
        np.testing.assert_array_equal(s1.X, s2.X)


class TestInnerProductDistortion:
    def test_zero_map_huge_eta(self):
        D = random_dictionary(8, 16, 9)
        sample = generate_sparse_model_data(D, 10, 0.01, 0.0001, seed=4)
        # eta so large every lasso solution is 0
        val = inner_product_distortion(np.zeros((4, 8)), sample, eta=1e6)
        assert val == 0.0

    def test_zero_map_equals_code_gram(self):
        D = random_dictionary(8, 16, 10)
        sample = generate_sparse_model_data(D, 15, 0.5, 0.005, seed=5)
        eta = 0.01
        val = inner_product_distortion(np.zeros((4, 8)), sample, eta)
        from isch.oracle import lasso_cd as cd

        C = np.stack([cd(D, x, eta) for x in sample.X])
        G = C @ C.T
        iu = np.triu_indices(15, k=1)
        assert val == pytest.approx(float((G[iu] ** 2).mean()))

    def test_rotation_invariance(self):
        from isch.params import ModelParams
        from isch.rotation import random_rotation
        from isch.spectral import exact_spectral

        D = random_dictionary(16, 32, 11)
        params = ModelParams(tau=0.12, eta=0.05, bits_m=8, blocks_q=1)
        W = exact_spectral(D, 8, params).W
        sample = generate_sparse_model_data(D, 30, params.tau, params.sigma_sq,
                                            seed=6)
        R = random_rotation(8, np.random.default_rng(7))
        v1 = inner_product_distortion(W, sample, params.eta)
        v2 = inner_product_distortion(R.T @ W, sample, params.eta)
        assert v1 == pytest.approx(v2, abs=1e-9)
