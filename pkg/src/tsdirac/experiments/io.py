"""CSV and snapshot output for the experiment harness.

CSV files are UTF-8 with a header row, comma separated; floats carry 17
significant digits so round-trips are lossless.

Snapshot layout (densities of a spinor on its grid):

    tsdirac-snapshot 1
    ndim <d>
    shape <n1> [<n2>]
    domain <lo1> <hi1> [<lo2> <hi2>]
    time <t>
    fields rho1 rho2
    end

followed immediately by the binary payload: rho1 then rho2, each a C
row-major array of little-endian float64 of the stated shape.  The header
is ASCII, newline terminated, so the payload starts one byte after the
"end" line's newline.
"""

from __future__ import annotations

import csv
import os
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..spectral import SpatialGrid

MAGIC = "tsdirac-snapshot 1"


def fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (np.floating,)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_snapshot(path: str, grid: SpatialGrid, t: float,
                   rho1: np.ndarray, rho2: np.ndarray) -> None:
    if rho1.shape != grid.shape or rho2.shape != grid.shape:
        raise ConfigurationError(f"density shape {rho1.shape} does not match grid {grid.shape}")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    lines = [
        MAGIC,
        f"ndim {grid.ndim}",
        "shape " + " ".join(str(n) for n in grid.shape),
        "domain " + " ".join(fmt(v) for pair in zip(grid.lo, grid.hi) for v in pair),
        f"time {fmt(float(t))}",
        "fields rho1 rho2",
        "end",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(rho1, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(rho2, dtype="<f8").tobytes())


def read_snapshot(path: str) -> dict:
    """Parse a snapshot file; returns shape/domain/time and density arrays."""
    with open(path, "rb") as fh:
        blob = fh.read()
    fields = {}
    pos = 0
    lines = []
    while True:
        nl = blob.index(b"\n", pos)
        line = blob[pos:nl].decode("ascii")
        pos = nl + 1
        lines.append(line)
        if line == "end":
            break
    if lines[0] != MAGIC:
        raise ConfigurationError(f"not a snapshot file: {path}")
    for line in lines[1:-1]:
        key, _, rest = line.partition(" ")
        fields[key] = rest.split()
    shape = tuple(int(n) for n in fields["shape"])
    count = int(np.prod(shape))
    payload = np.frombuffer(blob, dtype="<f8", offset=pos)
    if payload.size != 2 * count:
        raise ConfigurationError(
            f"snapshot payload has {payload.size} values, expected {2 * count}")
    dom = [float(v) for v in fields["domain"]]
    return {
        "ndim": int(fields["ndim"][0]),
        "shape": shape,
        "lo": tuple(dom[0::2]),
        "hi": tuple(dom[1::2]),
        "time": float(fields["time"][0]),
        "rho1": payload[:count].reshape(shape),
        "rho2": payload[count:].reshape(shape),
    }
