"""The five study figures as data series plus matplotlib rendering.

Every builder is a pure function of the replication table: the same CSV
yields the same series, so figures are reproducible by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .density import density_grid, gaussian_pdf, kde, silverman_bandwidth
from .records import ReplicationTable

FIGURE_IDS = ("fig1a", "fig1b", "fig1c", "fig2a", "fig2b")


@dataclass(frozen=True)
class FigureData:
    figure_id: str
    title: str
    caption: str
    series: dict[str, tuple[np.ndarray, np.ndarray]]
    styles: dict[str, str] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


def _need(n: int, what: str) -> None:
    if n < 2:
        raise ValueError(f"insufficient data: {what} needs at least 2 rows, got {n}")


def tau_densities(table: ReplicationTable) -> FigureData:
    """Effect and estimate densities overlaid; the estimate is far wider."""
    _need(table.n, "fig1a")
    h_tau = silverman_bandwidth(table.tau) if table.tau.std(ddof=1) > 0 else None
    if h_tau is None:
        raise ValueError("degenerate tau column (zero variance)")
    both = np.concatenate([table.tau, table.tau_hat])
    grid = density_grid(table.tau_hat)
    lo = min(grid[0], both.min())
    hi = max(grid[-1], both.max())
    grid = np.linspace(lo, hi, grid.size)
    h_hat = silverman_bandwidth(table.tau_hat)
    return FigureData(
        figure_id="fig1a",
        title="Average effect and its estimate across replicates",
        caption=(
            f"Gaussian-kernel KDEs, Silverman bandwidths "
            f"{h_tau:.3g} (effect) and {h_hat:.3g} (estimate)."
        ),
        series={
            "effect": (grid, kde(table.tau, grid)),
            "estimate": (grid, kde(table.tau_hat, grid)),
        },
    )


def error_vs_gaussian(table: ReplicationTable) -> FigureData:
    """Estimation-error density against a Gaussian with the error's sd."""
    _need(table.n, "fig1b")
    w = table.w
    sd = float(w.std(ddof=1))
    if sd == 0.0:
        raise ValueError("degenerate error column (zero variance)")
    grid = density_grid(w)
    h = silverman_bandwidth(w)
    return FigureData(
        figure_id="fig1b",
        title="Estimation error vs a Gaussian of matching scale",
        caption=f"Gaussian-kernel KDE, Silverman bandwidth {h:.3g}; reference sd {sd:.3g}.",
        series={
            "error": (grid, kde(w, grid)),
            "gaussian": (grid, gaussian_pdf(grid, 0.0, sd)),
        },
        styles={"gaussian": "--"},
    )


def psi_by_group(table: ReplicationTable) -> FigureData:
    """Variance-estimate density per parity group; two separated clusters."""
    _need(table.n, "fig1c")
    series: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    warnings: list[str] = []
    for name in ("even", "odd"):
        idx = [i for i, g in enumerate(table.parity_group) if g == name]
        if len(idx) < 2:
            warnings.append(f"parity group {name!r} absent or too small; cluster omitted")
            continue
        vals = table.psi_bar[idx]
        if vals.std(ddof=1) == 0.0:
            warnings.append(f"parity group {name!r} degenerate; cluster omitted")
            continue
        grid = density_grid(vals)
        series[name] = (grid, kde(vals, grid))
    if not series:
        raise ValueError("insufficient data: no parity group has two distinct values")
    caption = "Gaussian-kernel KDEs per group, Silverman bandwidths."
    if warnings:
        caption += " " + " ".join(warnings)
    return FigureData(
        figure_id="fig1c",
        title="Variance estimates by parity of the regime-switch time",
        caption=caption,
        series=series,
        warnings=tuple(warnings),
    )


def z_vs_standard_gaussian(table: ReplicationTable, naive: bool) -> FigureData:
    """Normalized error against the standard Gaussian density."""
    _need(table.n, "fig2b" if naive else "fig2a")
    z = table.z_naive if naive else table.z
    if z.std(ddof=1) == 0.0:
        raise ValueError("degenerate normalized column (zero variance)")
    grid = density_grid(z)
    h = silverman_bandwidth(z)
    label = "z_naive" if naive else "z"
    return FigureData(
        figure_id="fig2b" if naive else "fig2a",
        title=(
            "Naive normalization (covariances dropped)"
            if naive
            else "Covariance-aware normalization"
        ),
        caption=f"Gaussian-kernel KDE of {label}, Silverman bandwidth {h:.3g}.",
        series={
            label: (grid, kde(z, grid)),
            "standard gaussian": (grid, gaussian_pdf(grid, 0.0, 1.0)),
        },
        styles={"standard gaussian": "--"},
    )


def build_all(table: ReplicationTable) -> list[FigureData]:
    return [
        tau_densities(table),
        error_vs_gaussian(table),
        psi_by_group(table),
        z_vs_standard_gaussian(table, naive=False),
        z_vs_standard_gaussian(table, naive=True),
    ]


def render(data: FigureData, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, (grid, values) in data.series.items():
        ax.plot(grid, values, data.styles.get(label, "-"), label=label)
    ax.set_title(data.title)
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    fig.text(0.01, 0.01, data.caption, fontsize=7, ha="left")
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    fig.savefig(path, dpi=150)
    plt.close(fig)
