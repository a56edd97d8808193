import numpy as np
import pytest

from lagmart.ma import MovingAverageMoments, generate_ma_process


class TestGenerator:
    def test_lag0_reduces_to_iid(self):
        path = generate_ma_process(q=1, p=0, coeffs=[1.0], innovations_sd=1.0, n=2000, seed=1)
        assert path.start == 1
        # identical seed, raw innovations
        rng = np.random.default_rng(1)
        eps = rng.standard_normal((2000, 1))
        np.testing.assert_array_equal(path.values, eps[:, 0])

    def test_reproducible_from_seed(self):
        a = generate_ma_process(q=2, p=1, coeffs=[np.eye(2), 0.5 * np.eye(2)],
                                innovations_sd=np.eye(2), n=500, seed=42)
        b = generate_ma_process(q=2, p=1, coeffs=[np.eye(2), 0.5 * np.eye(2)],
                                innovations_sd=np.eye(2), n=500, seed=42)
        np.testing.assert_array_equal(a.values, b.values)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="coefficient shape"):
            generate_ma_process(q=2, p=0, coeffs=[np.eye(3)], innovations_sd=np.eye(2),
                                n=10, seed=0)
        with pytest.raises(ValueError, match="p \\+ 1"):
            generate_ma_process(q=1, p=1, coeffs=[1.0], innovations_sd=1.0, n=10, seed=0)
        with pytest.raises(ValueError, match="exceed"):
            generate_ma_process(q=1, p=3, coeffs=[1.0] * 4, innovations_sd=1.0, n=3, seed=0)

    def test_ma1_analytic_moments(self):
        # Var(X) = 2 and Cov(X_k, X_{k-1}) = 1 for theta = (1, 1), unit innovations
        n = 100_000
        path = generate_ma_process(q=1, p=1, coeffs=[1.0, 1.0], innovations_sd=1.0,
                                   n=n, seed=7)
        x = path.values
        m = x.size
        se_var = np.sqrt(2.0 * 2.0**2 / m)
        se_cov = np.sqrt((2.0**2 + 1.0) / m)
        assert abs(x.var() - 2.0) <= 3 * se_var
        c = np.mean(x[1:] * x[:-1]) - x[1:].mean() * x[:-1].mean()
        assert abs(c - 1.0) <= 3 * se_cov

    def test_lag_orthogonality_beyond_p(self):
        # mean over replicates of X_k * eps_{k-p-1-j} should sit at 0 within 4 SE
        p = 1
        reps = 400
        n = 60
        prods = []
        for r in range(reps):
            rng = np.random.default_rng(r)
            eps = rng.standard_normal((n, 1))
            x = eps[p:, 0] + eps[:-p, 0]  # theta = (1, 1)
            k = n - 1  # last index, 0-based into eps
            prods.append(x[-1] * eps[k - p - 1, 0])
        prods = np.asarray(prods)
        se = prods.std(ddof=1) / np.sqrt(reps)
        assert abs(prods.mean()) <= 4 * se

    def test_lag_relationship_p_implies_q(self):
        # a generator passing the lag-p orthogonality check also passes lag-q, q > p
        reps = 400
        n = 50
        for extra in (1, 2):
            prods = []
            for r in range(reps):
                rng = np.random.default_rng(1000 + r)
                eps = rng.standard_normal(n)
                x = eps[1:] + eps[:-1]
                k = n - 2  # 0-based into x
                prods.append(x[k] * eps[k + 1 - 1 - 1 - extra])
            prods = np.asarray(prods)
            se = prods.std(ddof=1) / np.sqrt(reps)
            assert abs(prods.mean()) <= 4 * se


class TestAnalyticProvider:
    def test_scalar_values(self):
        prov = MovingAverageMoments(coeffs=[1.0, 1.0], innovations_sd=1.0)
        assert prov.var_at(5) == 2.0
        assert prov.cov_at(5, 1) == 1.0
        assert prov.cov_at(5, 2) == 0.0

    def test_matrix_values(self):
        th0 = np.array([[1.0, 0.2], [0.0, 1.0]])
        th1 = np.array([[0.5, 0.0], [0.1, 0.4]])
        L = np.array([[1.0, 0.0], [0.3, 0.9]])
        prov = MovingAverageMoments(coeffs=[th0, th1], innovations_sd=L)
        sigma = L @ L.T
        np.testing.assert_allclose(prov.var_at(3), th0 @ sigma @ th0.T + th1 @ sigma @ th1.T)
        np.testing.assert_allclose(prov.cov_at(3, 1), th1 @ sigma @ th0.T)

    def test_monte_carlo_cross_check(self):
        # sample Var/Cov of the generated process against the provider, 4 SE
        th0, th1 = 1.0, 0.7
        prov = MovingAverageMoments(coeffs=[th0, th1], innovations_sd=1.0)
        n = 200_000
        x = generate_ma_process(q=1, p=1, coeffs=[th0, th1], innovations_sd=1.0,
                                n=n, seed=11).values
        v = prov.var_at(0)
        se_var = np.sqrt(2.0 * v**2 / x.size)
        assert abs(x.var() - v) <= 4 * se_var
