"""CSV / summary serialization of simulation records (atomic writes)."""

from __future__ import annotations

import io
import os
import tempfile
from pathlib import Path

import numpy as np

from .simulator import COLUMNS, SimulationRecord


def atomic_write(path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def record_to_csv(record: SimulationRecord) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    np.savetxt(buf, record.data, fmt="%.17g", delimiter=",")
    return buf.getvalue()


def summary_to_text(summary: dict) -> str:
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_record(record: SimulationRecord, csv_path, summary_path) -> None:
    atomic_write(csv_path, record_to_csv(record))
    atomic_write(summary_path, summary_to_text(record.summary))


def read_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    path = Path(path)
    with path.open() as fh:
        header = tuple(fh.readline().strip().split(","))
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def read_summary(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            key, _, value = line.partition(" = ")
            out[key] = value
    return out
