"""Replication CSV schema and readers/writers.

One row per replicate, header ``rep_id,seed,parity_group,switch_time,tau,
tau_hat,w,psi_bar,psi_naive,z,z_naive``.  Floats are written with 17
significant digits so parsing reproduces the binary values exactly; lines end
with LF and the encoding is UTF-8.
"""

from __future__ import annotations

from dataclasses import dataclass

from .simulate import ReplicationRecord

__all__ = ["CSV_HEADER", "SchemaError", "write_records", "read_records", "open_record_writer"]

CSV_HEADER = "rep_id,seed,parity_group,switch_time,tau,tau_hat,w,psi_bar,psi_naive,z,z_naive"

_PARITY_VALUES = ("even", "odd", "none")


class SchemaError(ValueError):
    """The CSV does not match the replication schema."""

    def __init__(self, message: str, line_number: int | None = None, line: str | None = None):
        self.line_number = line_number
        self.line = line
        if line_number is not None:
            message = f"line {line_number}: {message}"
        if line is not None:
            message = f"{message} [{line.rstrip()}]"
        super().__init__(message)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _record_line(r: ReplicationRecord) -> str:
    return ",".join(
        [
            str(r.rep_id),
            str(r.seed),
            r.parity_group,
            str(r.switch_time),
            _fmt(r.tau),
            _fmt(r.tau_hat),
            _fmt(r.w),
            _fmt(r.psi_bar),
            _fmt(r.psi_naive),
            _fmt(r.z),
            _fmt(r.z_naive),
        ]
    )


@dataclass
class _RecordWriter:
    fh: object

    def write(self, record: ReplicationRecord) -> None:
        self.fh.write(_record_line(record) + "\n")

    def close(self) -> None:
        self.fh.close()


def open_record_writer(path) -> _RecordWriter:
    fh = open(path, "w", encoding="utf-8", newline="\n")
    fh.write(CSV_HEADER + "\n")
    return _RecordWriter(fh)


def write_records(path, records) -> None:
    w = open_record_writer(path)
    try:
        for r in records:
            w.write(r)
    finally:
        w.close()


def _parse_row(parts: list[str], lineno: int, line: str) -> ReplicationRecord:
    if len(parts) != 11:
        raise SchemaError(f"expected 11 fields, got {len(parts)}", lineno, line)
    try:
        rep_id = int(parts[0])
        seed = int(parts[1])
        parity = parts[2]
        switch_time = int(parts[3])
        floats = [float(p) for p in parts[4:]]
    except ValueError as exc:
        raise SchemaError(f"unparseable field: {exc}", lineno, line) from None
    if parity not in _PARITY_VALUES:
        raise SchemaError(f"unknown parity group {parity!r}", lineno, line)
    return ReplicationRecord(
        rep_id=rep_id,
        seed=seed,
        parity_group=parity,
        switch_time=switch_time,
        tau=floats[0],
        tau_hat=floats[1],
        w=floats[2],
        psi_bar=floats[3],
        psi_naive=floats[4],
        z=floats[5],
        z_naive=floats[6],
    )


def read_records(path) -> list[ReplicationRecord]:
    """Parse a replication CSV, validating the schema row by row."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if header != CSV_HEADER:
            raise SchemaError(f"bad header {header!r}", 1, header)
        for lineno, line in enumerate(fh, start=2):
            stripped = line.rstrip("\n").rstrip("\r")
            if not stripped:
                continue
            records.append(_parse_row(stripped.split(","), lineno, stripped))
    if not records:
        raise SchemaError("no data rows")
    return records
