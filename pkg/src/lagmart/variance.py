"""Asymptotic-variance estimators built from conditional moments within the lag window.

Given a provider of the conditional variances Var(X_k | F_{k - p_k - 1}) and
lagged covariances Cov(X_k, X_{k-l} | F_{k - p_k - 1}), the per-block matrix

    Psi_j = sum_{k=b_j}^{a_j - 1} [ Var(k) + sum_{l=1}^{min(p_k, k - b_j)}
            ( Cov(k, l) + Cov(k, l)' ) ]

truncates covariances at the block start so no cross-block pairs enter.  The
major-only estimator sums Psi_j over complete major blocks; the full estimator
replaces the block truncation with min(p_k, k - s) and needs no blocking at
all.  Their Frobenius-norm gap is the negligibility diagnostic of the simple
estimator.

Accumulation is compensated and runs in ascending k with a fixed order, so
results are reproducible and the scalar (float-valued provider) and matrix
(1x1-array provider) paths execute identical operation sequences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .blocks import BlockScheme, LagSpec

__all__ = [
    "CondMomentProvider",
    "ConstantMoments",
    "ArrayMoments",
    "PsiEstimate",
    "VnDiagnostic",
    "psi_block",
    "psi_major",
    "psi_bar",
    "vn_diagnostic",
    "as_matrix_provider",
]


@runtime_checkable
class CondMomentProvider(Protocol):
    """Supplies q x q conditional moments (plain floats when q = 1).

    var_at(k) must be symmetric positive semidefinite; cov_at(k, l) is the
    covariance of X_k with X_{k-l} given the lag filtration, defined for
    1 <= l <= p_k.
    """

    q: int

    def var_at(self, k: int): ...

    def cov_at(self, k: int, l: int): ...


class ConstantMoments:
    """Index-independent moments, mostly for tests and closed-form checks."""

    def __init__(self, var, cov_by_lag: Sequence = ()) -> None:
        self._var = var
        self._cov = list(cov_by_lag)
        self.q = 1 if np.isscalar(var) else np.asarray(var).shape[0]
        _check_var_psd(var)

    def var_at(self, k: int):
        return self._var

    def cov_at(self, k: int, l: int):
        if l < 1:
            raise ValueError("lag l must be at least 1")
        if l <= len(self._cov):
            return self._cov[l - 1]
        return 0.0 if self.q == 1 else np.zeros((self.q, self.q))


class ArrayMoments:
    """Scalar moments stored per index, e.g. recorded along a simulated path.

    ``var[i]`` is Var(X_{start+i} | .) and ``cov[l-1][i]`` is
    Cov(X_{start+i}, X_{start+i-l} | .).
    """

    def __init__(self, var: np.ndarray, covs: Sequence[np.ndarray], start: int) -> None:
        self._var = np.asarray(var, dtype=float)
        self._covs = [np.asarray(c, dtype=float) for c in covs]
        if any(c.shape != self._var.shape for c in self._covs):
            raise ValueError("covariance arrays must match the variance array shape")
        if self._var.size and self._var.min() < -1e-10 * max(abs(self._var).max(), 1.0):
            raise ValueError("variance array has a significantly negative entry")
        self.start = start
        self.q = 1

    def var_at(self, k: int) -> float:
        return float(self._var[k - self.start])

    def cov_at(self, k: int, l: int) -> float:
        if not 1 <= l <= len(self._covs):
            raise ValueError(f"no covariance recorded at lag {l}")
        return float(self._covs[l - 1][k - self.start])


def _check_var_psd(var) -> None:
    if np.isscalar(var):
        if var < -1e-10 * max(abs(var), 1.0):
            raise ValueError(f"negative variance {var}")
        return
    m = np.asarray(var, dtype=float)
    sym_gap = np.abs(m - m.T).max()
    if sym_gap > 1e-12 * max(np.abs(m).max(), 1.0):
        raise ValueError("variance matrix is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (m + m.T))
    if ev.min() < -1e-10 * max(np.trace(m), 1.0):
        raise ValueError("variance matrix is not positive semidefinite")


@dataclass(frozen=True)
class PsiEstimate:
    """A variance estimate with its provenance.

    ``matrix`` is always q x q (1 x 1 for scalar providers); ``scalar`` gives
    the float view when q = 1.  kind is one of "per_block", "major", "full".
    """

    matrix: np.ndarray
    kind: str
    k_n: int
    scheme: BlockScheme | None = None

    def __post_init__(self) -> None:
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if m.shape[0] == 1 and float(m[0, 0]) < 0.0:
            warnings.warn(
                f"negative scalar variance estimate {float(m[0, 0])!r} "
                f"(kind={self.kind}); finite-sample estimates may dip negative",
                stacklevel=3,
            )

    @property
    def q(self) -> int:
        return self.matrix.shape[0]

    @property
    def scalar(self) -> float:
        if self.q != 1:
            raise ValueError("scalar view requires q = 1")
        return float(self.matrix[0, 0])


@dataclass(frozen=True)
class VnDiagnostic:
    """Frobenius gap between the full and major-only estimators."""

    absolute: float
    normalized: float
    full: PsiEstimate
    major: PsiEstimate


class _Kahan:
    """Compensated accumulator working identically on floats and ndarrays."""

    __slots__ = ("total", "comp")

    def __init__(self, zero) -> None:
        self.total = zero
        self.comp = zero * 0.0 if isinstance(zero, np.ndarray) else 0.0

    def add(self, x) -> None:
        y = x - self.comp
        t = self.total + y
        self.comp = (t - self.total) - y
        self.total = t


def _transpose(x):
    return x.T if isinstance(x, np.ndarray) else x


def _zero_like(provider: CondMomentProvider):
    return 0.0 if provider.q == 1 else np.zeros((provider.q, provider.q))


def _term_at(provider: CondMomentProvider, lag: LagSpec, k: int, lo: int):
    """Var(k) plus the symmetrized covariances for lags 1..min(p_k, k - lo)."""
    term = provider.var_at(k)
    lmax = min(lag.p_at(k), k - lo)
    for l in range(1, lmax + 1):
        c = provider.cov_at(k, l)
        term = term + (c + _transpose(c))
    return term


def _wrap(value, kind: str, k_n: int, scheme: BlockScheme | None) -> PsiEstimate:
    mat = np.array([[value]]) if not isinstance(value, np.ndarray) else value
    return PsiEstimate(matrix=mat, kind=kind, k_n=k_n, scheme=scheme)


def psi_block(provider: CondMomentProvider, scheme: BlockScheme, j: int) -> PsiEstimate:
    """Per-block variance matrix Psi_j over major block j (1-based)."""
    if not 1 <= j <= scheme.n_blocks:
        raise ValueError(f"block {j} not materialized (have {scheme.n_blocks})")
    b_j = scheme.b[j - 1]
    a_j = scheme.a[j - 1]
    acc = _Kahan(_zero_like(provider))
    for k in range(b_j, a_j):
        acc.add(_term_at(provider, scheme.lag, k, b_j))
    return _wrap(acc.total, "per_block", a_j - 1, scheme)


def psi_major(provider: CondMomentProvider, scheme: BlockScheme, k_n: int) -> PsiEstimate:
    """Major-only estimator: sum of Psi_j over complete major blocks."""
    if k_n < scheme.a[0] - 1:
        raise ValueError(f"k_n = {k_n} precedes the first block end {scheme.a[0] - 1}")
    acc = _Kahan(_zero_like(provider))
    j = 1
    while j <= scheme.n_blocks and scheme.a[j - 1] - 1 <= k_n:
        b_j = scheme.b[j - 1]
        for k in range(b_j, scheme.a[j - 1]):
            acc.add(_term_at(provider, scheme.lag, k, b_j))
        j += 1
    if j > scheme.n_blocks and scheme.b[-1] <= k_n:
        raise ValueError(f"scheme not materialized through k_n = {k_n}")
    return _wrap(acc.total, "major", k_n, scheme)


def psi_bar(provider: CondMomentProvider, lag: LagSpec, s: int, k_n: int) -> PsiEstimate:
    """Full estimator summing every index with lags truncated at the array start.

    Scheme-independent: the covariance range is 1..min(p_k, k - s).
    """
    if k_n < s:
        raise ValueError(f"k_n = {k_n} < s = {s}")
    acc = _Kahan(_zero_like(provider))
    for k in range(s, k_n + 1):
        acc.add(_term_at(provider, lag, k, s))
    return _wrap(acc.total, "full", k_n, None)


def vn_diagnostic(
    provider: CondMomentProvider,
    scheme: BlockScheme,
    lag: LagSpec,
    s: int,
    k_n: int,
) -> VnDiagnostic:
    """Frobenius norm of the full-minus-major gap, raw and normalized.

    The normalized value divides by the Frobenius norm of the full estimator;
    it is reported as 0 when both estimators vanish.
    """
    full = psi_bar(provider, lag, s, k_n)
    major = psi_major(provider, scheme, k_n)
    diff = full.matrix - major.matrix
    absolute = float(np.linalg.norm(diff, "fro"))
    denom = float(np.linalg.norm(full.matrix, "fro"))
    if denom == 0.0:
        normalized = 0.0 if absolute == 0.0 else math.inf
    else:
        normalized = absolute / denom
    return VnDiagnostic(absolute=absolute, normalized=normalized, full=full, major=major)


def psi_matrix_csv(est: PsiEstimate) -> str:
    """Row-major CSV serialization of an estimate, header ``row,col,value``."""
    lines = ["row,col,value"]
    m = est.matrix
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            lines.append(f"{i},{j},{format(float(m[i, j]), '.17g')}")
    return "\n".join(lines) + "\n"


class _MatrixView:
    """1x1-matrix adapter over a scalar provider (same call order, array ops)."""

    def __init__(self, inner: CondMomentProvider) -> None:
        if inner.q != 1:
            raise ValueError("matrix view is for scalar providers")
        self._inner = inner
        self.q = 1

    def var_at(self, k: int):
        return np.array([[self._inner.var_at(k)]])

    def cov_at(self, k: int, l: int):
        return np.array([[self._inner.cov_at(k, l)]])


def as_matrix_provider(provider: CondMomentProvider) -> CondMomentProvider:
    """Route a scalar provider through the ndarray accumulation path."""
    return _MatrixView(provider)
