"""Vector moving-average generator, a canonical lag-p martingale difference source.

X_k = sum_{l=0..p} Theta_l eps_{k-l} with iid zero-mean Gaussian innovations is
adapted to the innovation filtration and has zero mean given information up to
k - p - 1, so it exercises the blocking and variance machinery with moments
that are available in closed form.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .blocks import SeriesPath

__all__ = ["generate_ma_process", "MovingAverageMoments"]


def _as_coeff_matrices(q: int, coeffs: Sequence) -> list[np.ndarray]:
    out = []
    for theta in coeffs:
        m = np.atleast_2d(np.asarray(theta, dtype=float))
        if m.shape != (q, q):
            raise ValueError(f"coefficient shape {m.shape} != ({q}, {q})")
        out.append(m)
    return out


def generate_ma_process(
    q: int,
    p: int,
    coeffs: Sequence,
    innovations_sd,
    n: int,
    seed,
) -> SeriesPath:
    """Simulate X_k = sum_{l=0..p} Theta_l eps_{k-l} for k = p+1 .. n.

    ``coeffs`` holds the p+1 matrices Theta_0..Theta_p (scalars accepted when
    q = 1); ``innovations_sd`` is the q x q scale matrix L with eps_k = L z_k,
    z_k standard Gaussian.  Reproducible: the draw is a pure function of
    ``seed``.  The returned path starts at p + 1.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if len(coeffs) != p + 1:
        raise ValueError(f"need p + 1 = {p + 1} coefficient matrices, got {len(coeffs)}")
    if n <= p:
        raise ValueError(f"n = {n} must exceed p = {p}")
    thetas = _as_coeff_matrices(q, coeffs)
    L = np.atleast_2d(np.asarray(innovations_sd, dtype=float))
    if L.shape != (q, q):
        raise ValueError(f"innovations_sd shape {L.shape} != ({q}, {q})")

    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n, q)) @ L.T
    m = n - p
    x = np.zeros((m, q))
    for l, theta in enumerate(thetas):
        x += eps[p - l : n - l] @ theta.T
    if q == 1:
        return SeriesPath(values=x[:, 0], start=p + 1)
    return SeriesPath(values=x, start=p + 1)


class MovingAverageMoments:
    """Exact conditional moments of the MA process given the lag filtration.

    Conditional on information up to k - p - 1 every innovation entering X_k
    and the shared innovations of X_{k-l} (l <= p) is still unobserved, so

        var_at(k)    = sum_{l=0..p} Theta_l Sigma Theta_l'
        cov_at(k, l) = sum_{m=l..p} Theta_m Sigma Theta_{m-l}'

    with Sigma = L L'.  Both are constant in k.  Scalar processes (q = 1)
    report plain floats.
    """

    def __init__(self, coeffs: Sequence, innovations_sd) -> None:
        L = np.atleast_2d(np.asarray(innovations_sd, dtype=float))
        q = L.shape[0]
        if L.shape != (q, q):
            raise ValueError("innovations_sd must be square")
        thetas = _as_coeff_matrices(q, coeffs)
        sigma = L @ L.T
        ev = np.linalg.eigvalsh(0.5 * (sigma + sigma.T))
        if ev.min() < -1e-10 * max(np.trace(sigma), 1.0):
            raise ValueError("innovation covariance is not positive semidefinite")
        self.q = q
        self.p = len(thetas) - 1
        self._var = sum(th @ sigma @ th.T for th in thetas)
        self._cov = [
            sum(thetas[m] @ sigma @ thetas[m - l].T for m in range(l, self.p + 1))
            for l in range(1, self.p + 1)
        ]

    def var_at(self, k: int):
        if self.q == 1:
            return float(self._var[0, 0])
        return self._var.copy()

    def cov_at(self, k: int, l: int):
        if not 1 <= l:
            raise ValueError("lag l must be at least 1")
        if l > self.p:
            if self.q == 1:
                return 0.0
            return np.zeros((self.q, self.q))
        if self.q == 1:
            return float(self._cov[l - 1][0, 0])
        return self._cov[l - 1].copy()
