"""Field snapshot I/O: raw binary arrays with JSON sidecars.

A snapshot is a pair of files sharing one stem:

* ``<stem>.bin`` — the field values as little-endian interleaved
  ``(re, im)`` 64-bit floats in C order with the third index fastest
  (``z-fastest``), exactly the in-memory layout of a field's
  ``complex128`` array;
* ``<stem>.json`` — a sidecar with keys ``{n, extent, t, omega, beta,
  layout, dtype}`` where ``layout`` is always ``"z-fastest"`` and
  ``dtype`` always ``"c128"``.

The format is deliberately language-neutral: any consumer can
reconstruct the array from the sidecar alone.  Readers validate the
sidecar and the byte count and raise :class:`SnapshotFormatError` on
any mismatch.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .grid import Field, GridSpec, PhysicsParams

__all__ = ["SIDECAR_KEYS", "write_snapshot", "read_snapshot"]

SIDECAR_KEYS = ("n", "extent", "t", "omega", "beta", "layout", "dtype")


def write_snapshot(
    stem: str | Path,
    field: Field,
    t: float,
    params: PhysicsParams,
) -> tuple[Path, Path]:
    """Write ``<stem>.bin`` + ``<stem>.json``; returns the two paths."""
    stem = Path(stem)
    bin_path = stem.with_suffix(".bin")
    json_path = stem.with_suffix(".json")
    data = np.ascontiguousarray(field.data, dtype="<c16")
    bin_path.parent.mkdir(parents=True, exist_ok=True)
    bin_path.write_bytes(data.tobytes())
    sidecar = {
        "n": field.grid.n,
        "extent": field.grid.extent,
        "t": float(t),
        "omega": params.omega,
        "beta": params.beta,
        "layout": "z-fastest",
        "dtype": "c128",
    }
    json_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return bin_path, json_path


def read_snapshot(stem: str | Path) -> tuple[Field, dict]:
    """Read a snapshot pair back into a field plus its sidecar dict.

    ``stem`` may be the bare stem or either of the two file paths.
    """
    stem = Path(stem)
    if stem.suffix in (".bin", ".json"):
        stem = stem.with_suffix("")
    bin_path = stem.with_suffix(".bin")
    json_path = stem.with_suffix(".json")
    if not json_path.exists():
        raise SnapshotFormatError(f"sidecar {json_path} not found")
    if not bin_path.exists():
        raise SnapshotFormatError(f"binary file {bin_path} not found")
    try:
        sidecar = json.loads(json_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"sidecar {json_path} is not valid JSON: {exc}")
    missing = [k for k in SIDECAR_KEYS if k not in sidecar]
    if missing:
        raise SnapshotFormatError(f"sidecar {json_path} lacks keys {missing}")
    if sidecar["layout"] != "z-fastest":
        raise SnapshotFormatError(
            f"unsupported layout {sidecar['layout']!r}; expected 'z-fastest'"
        )
    if sidecar["dtype"] != "c128":
        raise SnapshotFormatError(
            f"unsupported dtype {sidecar['dtype']!r}; expected 'c128'"
        )
    n = int(sidecar["n"])
    extent = float(sidecar["extent"])
    if n <= 0 or extent <= 0:
        raise SnapshotFormatError(f"sidecar {json_path} has n = {n}, extent = {extent}")
    raw = bin_path.read_bytes()
    expected = n**3 * 16
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{bin_path} holds {len(raw)} bytes; {expected} expected for n = {n}"
        )
    data = np.frombuffer(raw, dtype="<c16").reshape(n, n, n).astype(np.complex128)
    grid = GridSpec(n=n, extent=extent)
    return Field(grid, data), sidecar
