"""Matrix dumps: JSON header plus little-endian float64 re/im pairs, row-major."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

FORMAT = "complex128-le-interleaved-row-major"


def write_matrix(prefix, mat, header: dict | None = None, with_csv: bool = False) -> dict:
    """Write ``prefix.json`` and ``prefix.bin`` (and optionally ``prefix.csv``)."""
    prefix = Path(prefix)
    entries = np.asarray(getattr(mat, "entries", mat), dtype=complex)
    meta = dict(mat.header()) if hasattr(mat, "header") else {}
    meta.update(header or {})
    meta.update({"rows": entries.shape[0], "cols": entries.shape[1], "format": FORMAT,
                 "data": prefix.name + ".bin"})
    interleaved = np.empty(entries.shape + (2,), dtype="<f8")
    interleaved[..., 0] = entries.real
    interleaved[..., 1] = entries.imag
    prefix.with_suffix(".bin").write_bytes(interleaved.tobytes(order="C"))
    with open(prefix.with_suffix(".json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    if with_csv:
        with open(prefix.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "re", "im"])
            for (i, j), z in np.ndenumerate(entries):
                w.writerow([i, j, f"{z.real:.16e}", f"{z.imag:.16e}"])
    return meta


def read_matrix(prefix):
    """Return ``(header, entries)`` written by ``write_matrix``."""
    prefix = Path(prefix)
    with open(prefix.with_suffix(".json")) as fh:
        meta = json.load(fh)
    if meta.get("format") != FORMAT:
        raise ValueError(f"unsupported matrix format {meta.get('format')!r}")
    raw = np.frombuffer(prefix.with_suffix(".bin").read_bytes(), dtype="<f8")
    expected = 2 * meta["rows"] * meta["cols"]
    if raw.size != expected:
        raise ValueError(f"matrix data has {raw.size} values, expected {expected}")
    pairs = raw.reshape(meta["rows"], meta["cols"], 2)
    return meta, pairs[..., 0] + 1j * pairs[..., 1]
