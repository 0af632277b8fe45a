"""Serialization of spectral fields: CSV, JSON and a little-endian binary dump.

CSV/JSON carry one row per mode with columns ``k, xi, re, im`` (monotone order);
spinors add a ``component`` column (``upper``/``lower``) and half-wave snapshots
a ``field`` column.  The binary layout is::

    b"DKGFLD01" | uint32 N | float64 L | float64 t | uint32 n_fields
    then per field: uint16 name length | utf-8 name | N x complex128
    optionally: b"META" | uint32 length | utf-8 JSON object

all little-endian.  ``t`` is NaN for fields that are not time samples.  CSV
readers skip leading ``#`` comment lines (used for provenance).
"""
from __future__ import annotations

import csv
import io
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .dkg import HalfWaveState, SpinorField
from .spectral import ComplexScalarField, GridSpec

MAGIC = b"DKGFLD01"
_HEADER = struct.Struct("<8sIddI")
_NAME_LEN = struct.Struct("<H")
_META = b"META"
_META_LEN = struct.Struct("<I")

SNAPSHOT_FIELDS = ("psi_plus.upper", "psi_plus.lower", "psi_minus.upper",
                   "psi_minus.lower", "phi_plus", "phi_minus")


def fmt(x: float) -> str:
    """Round-trip float text (17 significant digits)."""
    return format(float(x), ".17g")


def atomic_write(path, payload) -> Path:
    """Write ``payload`` (str or bytes) to ``path`` via a same-directory rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(payload, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": ""})) as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _grid_from_xi(xi) -> GridSpec:
    xi = np.asarray(xi, dtype=float)
    return GridSpec(len(xi), 2.0 * np.pi / (xi[1] - xi[0]))


def _rows(grid: GridSpec, coeffs):
    for k, xi, c in zip(grid.k, grid.xi, coeffs):
        yield [str(int(k)), fmt(xi), fmt(c.real), fmt(c.imag)]


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- CSV ---------------------------------------------------------------------------

def scalar_to_csv(f: ComplexScalarField) -> str:
    return _table(["k", "xi", "re", "im"], _rows(f.grid, f.coeffs))


def spinor_to_csv(psi: SpinorField) -> str:
    c = psi.coeffs
    rows = [[name] + r for name, comp in (("upper", c[0]), ("lower", c[1]))
            for r in _rows(psi.grid, comp)]
    return _table(["component", "k", "xi", "re", "im"], rows)


def snapshot_to_csv(state: HalfWaveState, meta: dict | None = None) -> str:
    packed = state.pack()
    rows = []
    for name, comp in zip(SNAPSHOT_FIELDS, packed):
        field, _, part = name.partition(".")
        rows.extend([field, part] + r for r in _rows(state.grid, comp))
    return comment_lines(meta) + _table(["field", "component", "k", "xi", "re", "im"], rows)


def comment_lines(meta: dict | None) -> str:
    if not meta:
        return ""
    return "".join(f"# {k}: {v}\n" for k, v in sorted(meta.items()))


def _read_csv(text: str):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _coeffs_from_rows(rows):
    rows = sorted(rows, key=lambda r: int(r["k"]))
    xi = [float(r["xi"]) for r in rows]
    c = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return _grid_from_xi(xi), c


def scalar_from_csv(text: str) -> ComplexScalarField:
    grid, c = _coeffs_from_rows(_read_csv(text))
    return ComplexScalarField(grid, c)


def spinor_from_csv(text: str) -> SpinorField:
    rows = _read_csv(text)
    parts = {}
    for name in ("upper", "lower"):
        parts[name] = _coeffs_from_rows([r for r in rows if r["component"] == name])
    grid = parts["upper"][0]
    return SpinorField.from_array(grid, np.stack([parts["upper"][1], parts["lower"][1]]))


def snapshot_from_csv(text: str, t: float = 0.0) -> HalfWaveState:
    rows = _read_csv(text)
    comps = []
    for name in SNAPSHOT_FIELDS:
        field, _, part = name.partition(".")
        grid, c = _coeffs_from_rows([r for r in rows if r["field"] == field
                                     and r["component"] == part])
        comps.append(c)
    return HalfWaveState.unpack(t, grid, np.stack(comps))


# --- JSON --------------------------------------------------------------------------

def _coeff_record(grid: GridSpec, c) -> dict:
    return {
        "k": [int(k) for k in grid.k],
        "xi": [float(v) for v in grid.xi],
        "re": [float(v) for v in np.real(c)],
        "im": [float(v) for v in np.imag(c)],
    }


def _coeffs_from_record(rec) -> np.ndarray:
    order = np.argsort(rec["k"])
    c = np.asarray(rec["re"], dtype=float) + 1j * np.asarray(rec["im"], dtype=float)
    return c[order]


def scalar_to_json(f: ComplexScalarField) -> str:
    doc = {"N": f.grid.N, "L": f.grid.L, "rep": "spectral", **_coeff_record(f.grid, f.coeffs)}
    return json.dumps(doc, indent=1)


def scalar_from_json(text: str) -> ComplexScalarField:
    doc = json.loads(text)
    grid = GridSpec(int(doc["N"]), float(doc["L"]))
    return ComplexScalarField(grid, _coeffs_from_record(doc))


def spinor_to_json(psi: SpinorField) -> str:
    c = psi.coeffs
    doc = {"N": psi.grid.N, "L": psi.grid.L, "rep": "spectral",
           "components": {"upper": _coeff_record(psi.grid, c[0]),
                          "lower": _coeff_record(psi.grid, c[1])}}
    return json.dumps(doc, indent=1)


def spinor_from_json(text: str) -> SpinorField:
    doc = json.loads(text)
    grid = GridSpec(int(doc["N"]), float(doc["L"]))
    comps = doc["components"]
    return SpinorField.from_array(
        grid, np.stack([_coeffs_from_record(comps["upper"]), _coeffs_from_record(comps["lower"])]))


# --- binary ------------------------------------------------------------------------

def pack_binary(grid: GridSpec, named: dict, t: float = float("nan"), meta: dict | None = None) -> bytes:
    out = [_HEADER.pack(MAGIC, grid.N, grid.L, t, len(named))]
    for name, c in named.items():
        raw = name.encode("utf-8")
        out.append(_NAME_LEN.pack(len(raw)))
        out.append(raw)
        arr = np.ascontiguousarray(c, dtype="<c16")
        if arr.shape != (grid.N,):
            raise ValueError(f"field {name!r} has shape {arr.shape}, expected ({grid.N},)")
        out.append(arr.tobytes())
    if meta is not None:
        raw = json.dumps(meta, sort_keys=True).encode("utf-8")
        out += [_META, _META_LEN.pack(len(raw)), raw]
    return b"".join(out)


def unpack_binary(blob: bytes, with_meta: bool = False):
    """-> (grid, t, {name: coeffs}), plus the metadata dict when ``with_meta``."""
    if len(blob) < _HEADER.size:
        raise ValueError("truncated field dump")
    magic, n, length, t, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; expected {MAGIC!r}")
    grid = GridSpec(n, length)
    pos = _HEADER.size
    named = {}
    for _ in range(count):
        (ln,) = _NAME_LEN.unpack_from(blob, pos)
        pos += _NAME_LEN.size
        name = blob[pos:pos + ln].decode("utf-8")
        pos += ln
        nbytes = 16 * n
        if pos + nbytes > len(blob):
            raise ValueError("truncated field dump")
        named[name] = np.frombuffer(blob[pos:pos + nbytes], dtype="<c16").astype(complex)
        pos += nbytes
    meta = None
    if blob[pos:pos + 4] == _META:
        (ln,) = _META_LEN.unpack_from(blob, pos + 4)
        start = pos + 4 + _META_LEN.size
        if start + ln > len(blob):
            raise ValueError("truncated field dump")
        meta = json.loads(blob[start:start + ln].decode("utf-8"))
    if with_meta:
        return grid, t, named, meta
    return grid, t, named


def snapshot_to_binary(state: HalfWaveState, meta: dict | None = None) -> bytes:
    return pack_binary(state.grid, dict(zip(SNAPSHOT_FIELDS, state.pack())), state.t, meta)


def snapshot_from_binary(blob: bytes) -> HalfWaveState:
    grid, t, named = unpack_binary(blob)
    missing = [n for n in SNAPSHOT_FIELDS if n not in named]
    if missing:
        raise ValueError(f"snapshot lacks fields {missing}")
    return HalfWaveState.unpack(t, grid, np.stack([named[n] for n in SNAPSHOT_FIELDS]))


SNAPSHOT_WRITERS = {"csv": snapshot_to_csv, "bin": snapshot_to_binary}


def read_snapshot(path, t: float = 0.0) -> HalfWaveState:
    """Load a snapshot; CSV files carry no time, so ``t`` supplies it."""
    path = Path(path)
    if path.suffix == ".bin":
        return snapshot_from_binary(path.read_bytes())
    return snapshot_from_csv(path.read_text(), t)
