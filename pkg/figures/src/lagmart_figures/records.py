"""Replication CSV parsing against the published schema.

This package consumes the study engine only through its CSV interface, so the
schema is restated here: one row per replicate under the header below, floats
at full precision, LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CSV_HEADER = "rep_id,seed,parity_group,switch_time,tau,tau_hat,w,psi_bar,psi_naive,z,z_naive"

_PARITY_VALUES = ("even", "odd", "none")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class ReplicationTable:
    """Column view of a replication CSV."""

    rep_id: np.ndarray
    parity_group: list[str]
    tau: np.ndarray
    tau_hat: np.ndarray
    w: np.ndarray
    psi_bar: np.ndarray
    psi_naive: np.ndarray
    z: np.ndarray
    z_naive: np.ndarray

    @property
    def n(self) -> int:
        return self.tau.size


def read_table(path) -> ReplicationTable:
    rep_id = []
    parity = []
    floats = {name: [] for name in ("tau", "tau_hat", "w", "psi_bar", "psi_naive", "z", "z_naive")}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if header != CSV_HEADER:
            raise SchemaError(f"line 1: bad header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            stripped = line.rstrip("\n").rstrip("\r")
            if not stripped:
                continue
            parts = stripped.split(",")
            if len(parts) != 11:
                raise SchemaError(f"line {lineno}: expected 11 fields, got {len(parts)}")
            try:
                rep_id.append(int(parts[0]))
                int(parts[1])
                int(parts[3])
                values = [float(p) for p in parts[4:]]
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: unparseable field: {exc}") from None
            if parts[2] not in _PARITY_VALUES:
                raise SchemaError(f"line {lineno}: unknown parity group {parts[2]!r}")
            parity.append(parts[2])
            for name, v in zip(floats, values):
                floats[name].append(v)
    if not rep_id:
        raise SchemaError("no data rows")
    return ReplicationTable(
        rep_id=np.array(rep_id),
        parity_group=parity,
        **{name: np.array(vals) for name, vals in floats.items()},
    )
