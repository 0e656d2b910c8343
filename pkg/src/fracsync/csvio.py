"""Trajectory CSV files with ``#``-prefixed metadata lines.

Layout::

    # fracsync 0.1.0
    # config: {...json...}
    t,x,y,z
    0,0.01000000000000000021,...
    # status: completed

Values are written with 17 significant digits, so reading a file and writing
it back reproduces it byte for byte.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import List, TextIO

import numpy as np

__all__ = ["CsvTable", "format_value", "read_csv", "write_csv"]


def format_value(v: float) -> str:
    return format(float(v), ".17g")


@dataclass
class CsvTable:
    header: List[str]
    data: np.ndarray
    leading: List[str] = field(default_factory=list)
    trailing: List[str] = field(default_factory=list)

    def metadata(self) -> dict:
        """``key: value`` comment lines as a dict; ``config`` is JSON-decoded."""
        out = {}
        for line in self.leading + self.trailing:
            key, sep, value = line.partition(":")
            if not sep:
                continue
            key, value = key.strip(), value.strip()
            out[key] = json.loads(value) if key == "config" else value
        return out

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.header.index(name)]


def write_csv(stream: TextIO, table: CsvTable) -> None:
    for line in table.leading:
        stream.write(f"# {line}\n")
    stream.write(",".join(table.header) + "\n")
    for row in np.atleast_2d(table.data):
        stream.write(",".join(format_value(v) for v in row) + "\n")
    for line in table.trailing:
        stream.write(f"# {line}\n")


def read_csv(stream: TextIO) -> CsvTable:
    leading, trailing, rows = [], [], []
    header = None
    for raw in stream:
        line = raw.rstrip("\n")
        if line.startswith("#"):
            text = line[2:] if line.startswith("# ") else line[1:]
            (leading if header is None else trailing).append(text)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError("CSV has no header row")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return CsvTable(header, data, leading, trailing)


def dumps(table: CsvTable) -> str:
    buf = io.StringIO()
    write_csv(buf, table)
    return buf.getvalue()


def loads(text: str) -> CsvTable:
    return read_csv(io.StringIO(text))
