"""Bernstein blocking schemes and the block-sum decomposition of partial sums.

An adapted array (X_k)_{s <= k <= k_n} with the lag martingale property
E(X_k | F_{k - p_k - 1}) = 0 is partitioned into alternating *major* and
*minor* blocks.  Major block j starts at b_j and has length d_j = a_j - b_j;
the minor block that follows starts at a_j and has length c_j = b_{j+1} - a_j.
Summing within blocks decomposes the partial sum S_n into a major part S_B
(which behaves like a martingale difference sequence in j), a minor part S_A,
and the remainder S_C contributed by a trailing incomplete major block.

This module constructs the two standard schemes (fixed minor length for a
constant lag, and the power-sum scheme for sublinear diverging lags), performs
the decomposition with compensated summation, and evaluates finite-horizon
diagnostics for the negligibility conditions the schemes are designed to meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "LagSpec",
    "BlockScheme",
    "SeriesPath",
    "Decomposition",
    "ConditionReport",
    "build_diverging_blocks",
    "build_fixed_lag_blocks",
    "decompose",
    "diagnose_conditions",
]


@dataclass(frozen=True)
class LagSpec:
    """Lag structure p_k of a lag martingale difference array.

    ``fixed`` means p_k = p for every k.  ``diverging`` means p_k is given by
    ``lag_fn`` and is required to stay below order_C * k**order_gamma, which
    keeps the lag sublinear when order_gamma < 1.
    """

    kind: str  # "fixed" | "diverging"
    p: int | None = None
    lag_fn: Callable[[int], int] | None = None
    order_gamma: float = 0.0
    order_C: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "diverging"):
            raise ValueError(f"unknown lag kind {self.kind!r}")
        if self.kind == "fixed":
            if self.p is None or self.p < 0:
                raise ValueError("fixed lag requires p >= 0")
        else:
            if self.lag_fn is None:
                raise ValueError("diverging lag requires lag_fn")
        if not 0.0 <= self.order_gamma < 1.0:
            raise ValueError("order_gamma must lie in [0, 1)")
        if self.order_C <= 0.0:
            raise ValueError("order_C must be positive")

    @classmethod
    def fixed(cls, p: int) -> "LagSpec":
        return cls(kind="fixed", p=p, order_gamma=0.0, order_C=float(max(p, 1)))

    @classmethod
    def power(cls, order_C: float, order_gamma: float) -> "LagSpec":
        """Diverging lag p_k = min(k - 1, floor(C * k**gamma))."""

        def lag_fn(k: int) -> int:
            return min(k - 1, int(math.floor(order_C * float(k) ** order_gamma)))

        return cls(kind="diverging", lag_fn=lag_fn,
                   order_gamma=order_gamma, order_C=order_C)

    def p_at(self, k: int) -> int:
        if self.kind == "fixed":
            return self.p  # type: ignore[return-value]
        return int(self.lag_fn(k))  # type: ignore[misc]

    def validate_range(self, s: int, k_max: int) -> None:
        """Check the lag bounds on the finite range s..k_max."""
        for k in range(max(s, 1), k_max + 1):
            pk = self.p_at(k)
            if pk < 0:
                raise ValueError(f"p_{k} = {pk} is negative")
            if k - pk - 1 < 0:
                raise ValueError(f"k - p_k - 1 = {k - pk - 1} < 0 at k = {k}")
            if pk > self.order_C * float(k) ** self.order_gamma:
                raise ValueError(
                    f"p_{k} = {pk} exceeds order bound "
                    f"{self.order_C} * {k}**{self.order_gamma}"
                )


@dataclass(frozen=True)
class BlockScheme:
    """Materialized block boundaries.

    ``b[j]`` and ``a[j]`` (0-based storage of b_{j+1}, a_{j+1}) are the start
    indices of major block j+1 and of the minor block following it.  The last
    materialized major start exceeds the horizon the scheme was built for, so
    a path ending anywhere below it can be decomposed.
    """

    start_s: int
    b: tuple[int, ...]
    a: tuple[int, ...]
    lag: LagSpec

    def __post_init__(self) -> None:
        if len(self.b) != len(self.a):
            raise ValueError("b and a must have equal length")
        if not self.b:
            raise ValueError("scheme must contain at least one block")
        if self.b[0] != self.start_s:
            raise ValueError(f"b_1 = {self.b[0]} must equal the array start {self.start_s}")
        # c_j = 0 (an empty minor block) is legal: it happens at small j in the
        # power-sum construction with fractional sums, and for fixed lag 0
        for j in range(len(self.b)):
            if not self.a[j] > self.b[j]:
                raise ValueError(f"d_{j + 1} = {self.a[j] - self.b[j]} < 1")
            if j + 1 < len(self.b):
                c = self.b[j + 1] - self.a[j]
                if c < 0:
                    raise ValueError(f"c_{j + 1} = {c} < 0 (blocks overlap)")
                if self.lag.kind == "fixed" and c != self.lag.p:
                    raise ValueError(
                        f"fixed-lag scheme requires c_j = p = {self.lag.p}, got {c}"
                    )

    @property
    def n_blocks(self) -> int:
        return len(self.b)

    def d(self, j: int) -> int:
        """Major block length d_j (1-based j)."""
        return self.a[j - 1] - self.b[j - 1]

    def c(self, j: int) -> int:
        """Minor block length c_j (1-based j, requires block j+1)."""
        return self.b[j] - self.a[j - 1]

    def rows(self) -> list[tuple[int, int, int, int, int]]:
        """(j, b_j, a_j, c_j, d_j) rows for every j with a successor block."""
        out = []
        for j in range(1, self.n_blocks):
            out.append((j, self.b[j - 1], self.a[j - 1], self.c(j), self.d(j)))
        return out


@dataclass(frozen=True)
class SeriesPath:
    """A finite adapted array of scalar or q-vector values with a start index.

    ``values[i]`` is X_{start + i}; vector paths store one row per index.
    """

    values: np.ndarray
    start: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim not in (1, 2):
            raise ValueError("values must be 1-d (scalar) or 2-d (vector)")
        if arr.shape[0] == 0:
            raise ValueError("path is empty")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def k_n(self) -> int:
        return self.start + self.values.shape[0] - 1

    @property
    def q(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    def at(self, k: int):
        return self.values[k - self.start]


@dataclass(frozen=True)
class Decomposition:
    """Block-sum decomposition S_n = S_A + S_B + S_C of a path's partial sum."""

    minor_sums: tuple
    major_sums: tuple
    s_a: float | np.ndarray
    s_b: float | np.ndarray
    s_c: float | np.ndarray
    s_n: float | np.ndarray
    j_a: int
    j_b: int


@dataclass(frozen=True)
class ConditionReport:
    """Finite-J evaluation of the blocking negligibility conditions.

    ``cn[J-1]`` is sum(c_j)/sum(c_j + d_j) over j <= J, ``dn[J-1]`` is
    max(d_j)/sum(d_j) over j <= J.  ``lag_ok_from`` is the smallest block
    index from which the structural lag check k - p_k - 1 >= a_{j-1} - 1
    holds for every later checked block (None if the last checked block
    fails).  For non-constant lags the per-index scan is exact but capped by
    an index budget; ``lag_checked_through`` reports the largest block index
    the scan fully covered (equal to J when nothing was truncated).
    ``d_grows`` records whether the major lengths grew over the horizon.
    """

    J: int
    cn: tuple[float, ...]
    dn: tuple[float, ...]
    lag_ok_from: int | None
    lag_checked_through: int
    d_grows: bool
    d_nondecreasing: bool


def build_diverging_blocks(
    A: float,
    B: float,
    alpha: float,
    beta: float,
    s: int,
    k_max: int,
    lag: LagSpec | None = None,
) -> BlockScheme:
    """Construct the power-sum blocking scheme for sublinear diverging lags.

    a_j = ceil(sum_{l<=j} (lB)**beta + sum_{l<j} (lA)**alpha) + s and
    b_j = floor(sum_{l<j} ((lB)**beta + (lA)**alpha)) + s.  Requires
    alpha < beta, and the lag order must satisfy gamma < alpha / (1 + beta)
    for the scheme to absorb the lag structurally.

    Blocks are materialized through the first j with b_j > k_max so that any
    horizon k_n <= k_max is covered, including its trailing incomplete block.
    """
    if A <= 0 or B <= 0 or alpha <= 0 or beta <= 0:
        raise ValueError("A, B, alpha, beta must all be positive")
    if not alpha < beta:
        raise ValueError(f"requires alpha < beta, got alpha = {alpha}, beta = {beta}")
    if k_max < s:
        raise ValueError(f"k_max = {k_max} < s = {s}")
    if lag is None:
        # widest admissible sublinear order for these exponents
        gamma = 0.5 * alpha / (1.0 + beta)
        lag = LagSpec.power(order_C=1.0, order_gamma=gamma)
    if lag.kind == "diverging" and not lag.order_gamma < alpha / (1.0 + beta):
        raise ValueError(
            f"requires order_gamma < alpha / (1 + beta) = {alpha / (1.0 + beta)}, "
            f"got {lag.order_gamma}"
        )

    b: list[int] = []
    a: list[int] = []
    sum_b = 0.0  # sum_{l<=j} (lB)**beta, compensated
    sum_a = 0.0  # sum_{l<=j} (lA)**alpha, compensated
    comp_b = 0.0
    comp_a = 0.0
    j = 0
    while True:
        j += 1
        # b_j uses both sums through l = j - 1
        bj = math.floor(sum_b + sum_a) + s
        term = (j * B) ** beta
        y = term - comp_b
        t = sum_b + y
        comp_b = (t - sum_b) - y
        sum_b = t
        # a_j uses the beta sum through l = j and the alpha sum through l = j - 1
        aj = math.ceil(sum_b + sum_a) + s
        term = (j * A) ** alpha
        y = term - comp_a
        t = sum_a + y
        comp_a = (t - sum_a) - y
        sum_a = t
        if not math.isfinite(sum_a + sum_b) or sum_a + sum_b > 2**62:
            raise OverflowError(f"index arithmetic overflow at block j = {j}")
        b.append(bj)
        a.append(aj)
        if bj > k_max:
            break
    return BlockScheme(start_s=s, b=tuple(b), a=tuple(a), lag=lag)


def build_fixed_lag_blocks(
    p: int,
    s: int,
    k_max: int,
    growth_B: float = 1.0,
    growth_beta: float = 0.5,
) -> BlockScheme:
    """Construct a fixed-lag scheme: minors of length exactly p, b_1 = p + 1.

    Major lengths follow d_j = ceil((j * growth_B)**growth_beta), a slowly
    diverging default so that many blocks exist at desk-scale horizons.
    For p = 0 the minor blocks vanish and consecutive majors are contiguous.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    if s != p + 1:
        raise ValueError(f"fixed-lag convention requires s = p + 1, got s = {s}")
    if growth_B <= 0 or growth_beta <= 0:
        raise ValueError("growth parameters must be positive")
    if k_max < s:
        raise ValueError(f"k_max = {k_max} < s = {s}")
    b: list[int] = [s]
    a: list[int] = []
    j = 0
    while True:
        j += 1
        d = math.ceil((j * growth_B) ** growth_beta)
        if d < 1:
            d = 1
        a.append(b[-1] + d)
        if b[-1] > k_max:
            break
        b.append(a[-1] + p)
    b = b[: len(a)]
    return BlockScheme(start_s=s, b=tuple(b), a=tuple(a), lag=LagSpec.fixed(p))


def _component_fsum(path: SeriesPath, lo: int, hi: int):
    """Exact (Shewchuk) sum of X_k for lo <= k <= hi; 0 when the range is empty."""
    vals = path.values
    i0 = lo - path.start
    i1 = hi - path.start + 1
    if i1 <= i0:
        return 0.0 if vals.ndim == 1 else np.zeros(vals.shape[1])
    if vals.ndim == 1:
        return math.fsum(vals[i0:i1])
    return np.array([math.fsum(vals[i0:i1, c]) for c in range(vals.shape[1])])


def decompose(path: SeriesPath, scheme: BlockScheme) -> Decomposition:
    """Split the partial sum over the path into minor, major, and tail parts.

    Block sums truncate at the horizon: A_j sums a_j..min(b_{j+1} - 1, k_n)
    and B_j sums b_j..min(a_j - 1, k_n).  j_a counts minor blocks that have
    started by k_n, j_b counts complete major blocks, and the tail S_C equals
    the partial final major block when k_n lies in [b_{j_b+1}, a_{j_b+1} - 2]
    and is zero otherwise.
    """
    if path.start != scheme.start_s:
        raise ValueError(
            f"path start {path.start} does not match scheme start {scheme.start_s}"
        )
    k_n = path.k_n
    b, a = scheme.b, scheme.a
    if b[-1] <= k_n:
        raise ValueError(
            f"scheme materialized only through b = {b[-1]}; cannot cover k_n = {k_n}"
        )
    j_a = 0
    while j_a < len(a) and a[j_a] <= k_n:
        j_a += 1
    j_b = 0
    while j_b < len(a) and a[j_b] - 1 <= k_n:
        j_b += 1

    major_sums = []
    for j in range(j_b):
        major_sums.append(_component_fsum(path, b[j], min(a[j] - 1, k_n)))
    minor_sums = []
    for j in range(j_a):
        minor_sums.append(_component_fsum(path, a[j], min(b[j + 1] - 1, k_n)))

    zero = 0.0 if path.values.ndim == 1 else np.zeros(path.values.shape[1])
    if path.values.ndim == 1:
        s_a = math.fsum(minor_sums)
        s_b = math.fsum(major_sums)
    else:
        s_a = (np.array([math.fsum(col) for col in np.array(minor_sums).T])
               if minor_sums else zero.copy())
        s_b = (np.array([math.fsum(col) for col in np.array(major_sums).T])
               if major_sums else zero.copy())

    s_c = zero
    if j_b < len(b) and b[j_b] <= k_n <= a[j_b] - 2:
        s_c = _component_fsum(path, b[j_b], min(a[j_b] - 1, k_n))
    s_n = _component_fsum(path, path.start, k_n)
    return Decomposition(
        minor_sums=tuple(minor_sums),
        major_sums=tuple(major_sums),
        s_a=s_a,
        s_b=s_b,
        s_c=s_c,
        s_n=s_n,
        j_a=j_a,
        j_b=j_b,
    )


def diagnose_conditions(
    scheme: BlockScheme,
    lag: LagSpec | None = None,
    J: int = 100,
    lag_scan_budget: int = 5_000_000,
) -> ConditionReport:
    """Evaluate the minor-fraction, max-block, and structural lag diagnostics.

    Always computable: J is clamped to the number of blocks for which both
    c_j and d_j exist.  The structural check for block j compares the indices
    k in [b_j, a_j) against the preceding minor start, k - p_k - 1 >=
    a_{j-1} - 1, using a_0 = 1 so that the first block's requirement reduces
    to the adaptedness bound k - p_k - 1 >= 0.  For a constant lag the
    binding index is b_j (k - p - 1 grows with k), so the check is exact at
    every J; otherwise each index is tested until the scan budget runs out,
    and the report carries how far coverage reached.
    """
    if J < 2:
        raise ValueError("J must be at least 2")
    if lag is None:
        lag = scheme.lag
    J = min(J, scheme.n_blocks - 1)
    c = [scheme.c(j) for j in range(1, J + 1)]
    d = [scheme.d(j) for j in range(1, J + 1)]
    cn: list[float] = []
    dn: list[float] = []
    sum_c = 0
    sum_d = 0
    max_d = 0
    for j in range(J):
        sum_c += c[j]
        sum_d += d[j]
        max_d = max(max_d, d[j])
        cn.append(sum_c / (sum_c + sum_d))
        dn.append(max_d / sum_d)

    lag_ok_from: int | None = 1
    lag_checked_through = 0
    budget = lag_scan_budget
    for j in range(1, J + 1):
        prev_a = 1 if j == 1 else scheme.a[j - 2]
        b_j, a_j = scheme.b[j - 1], scheme.a[j - 1]
        if lag.kind == "fixed":
            ok = b_j - lag.p_at(b_j) - 1 >= prev_a - 1
        else:
            if budget < a_j - b_j:
                break
            budget -= a_j - b_j
            ok = all(k - lag.p_at(k) - 1 >= prev_a - 1 for k in range(b_j, a_j))
        lag_checked_through = j
        if not ok:
            lag_ok_from = j + 1 if j < J else None

    d_all = [scheme.d(j) for j in range(1, scheme.n_blocks + 1)]
    d_grows = d_all[-1] > d_all[0]
    d_nondecreasing = all(d_all[i + 1] >= d_all[i] for i in range(len(d_all) - 1))
    return ConditionReport(
        J=J,
        cn=tuple(cn),
        dn=tuple(dn),
        lag_ok_from=lag_ok_from,
        lag_checked_through=lag_checked_through,
        d_grows=d_grows,
        d_nondecreasing=d_nondecreasing,
    )
