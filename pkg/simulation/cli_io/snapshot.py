"""Raw little-endian field payload plus a JSON sidecar.

Complex fields are stored as interleaved (re, im) float64 pairs, vector
fields as their two components in order, all row-major.
"""
import hashlib
import json
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from simulation.dynamics import FieldState
from simulation.grid import Grid

SNAPSHOT_SCHEMA_VERSION = 1
FIELD_ORDER = ("phi", "dt_phi", "N", "dt_N", "A", "dt_A", "A0", "dt_A0")


class SnapshotError(IOError):
    pass


def snapshot_stem(t: float) -> str:
    return f"snap_{t:.6f}"


def _encode(array: np.ndarray) -> bytes:
    if np.iscomplexobj(array):
        return np.ascontiguousarray(array, dtype="<c16").view("<f8").tobytes()
    return np.ascontiguousarray(array, dtype="<f8").tobytes()


def write_snapshot(state: FieldState, directory: Union[str, Path]) -> Tuple[Path, Path]:
    directory = Path(directory)
    stem = snapshot_stem(state.t)
    bin_path, meta_path = directory / f"{stem}.bin", directory / f"{stem}.meta"

    digest = hashlib.sha256()
    layout = []
    offset = 0
    with open(bin_path, "wb") as f:
        for name in FIELD_ORDER:
            array = getattr(state, name)
            payload = _encode(array)
            f.write(payload)
            digest.update(payload)
            layout.append({
                "name": name,
                "dtype": "complex128" if np.iscomplexobj(array) else "float64",
                "shape": list(array.shape),
                "offset": offset,
                "nbytes": len(payload),
            })
            offset += len(payload)

    meta = {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "t": state.t,
        "grid": state.grid.describe(),
        "byte_order": "little",
        "fields": layout,
        "sha256": digest.hexdigest(),
    }
    with open(meta_path, "w") as f:
        json.dump(meta, f, indent=2)
    return bin_path, meta_path


def read_snapshot(path: Union[str, Path]) -> FieldState:
    """Load a snapshot from its .bin, .meta or extension-less path."""
    path = Path(path)
    stem = path.with_suffix("") if path.suffix in (".bin", ".meta") else path
    bin_path, meta_path = stem.with_suffix(".bin"), stem.with_suffix(".meta")

    try:
        with open(meta_path) as f:
            meta = json.load(f)
        payload = bin_path.read_bytes()
    except (OSError, json.JSONDecodeError) as e:
        raise SnapshotError(f"cannot read snapshot {stem}: {e}") from e

    if meta.get("schema_version") != SNAPSHOT_SCHEMA_VERSION:
        raise SnapshotError(f"snapshot schema {meta.get('schema_version')} is not {SNAPSHOT_SCHEMA_VERSION}")
    if meta.get("byte_order") != "little":
        raise SnapshotError(f"unsupported byte order {meta.get('byte_order')!r}")
    if hashlib.sha256(payload).hexdigest() != meta.get("sha256"):
        raise SnapshotError(f"checksum mismatch for {bin_path}")

    grid = Grid(**meta["grid"])
    arrays = {}
    for entry in meta["fields"]:
        chunk = payload[entry["offset"]:entry["offset"] + entry["nbytes"]]
        dtype = "<c16" if entry["dtype"] == "complex128" else "<f8"
        arrays[entry["name"]] = np.frombuffer(chunk, dtype=dtype).reshape(entry["shape"])
    missing = set(FIELD_ORDER) - set(arrays)
    if missing:
        raise SnapshotError(f"snapshot lacks fields {sorted(missing)}")
    return FieldState(grid=grid, t=float(meta["t"]), **arrays)
