"""On-disk formats.

Signals use the flat binary layout ``CSK1``: magic, u32 length (little
endian), u8 scalar kind (0 = real f64, 1 = complex f64 pairs), then the
little-endian payload.  Dense matrices use ``CSKM``: magic, u32 m, u32 N,
then row-major complex f64 pairs.  Small fixtures may round-trip through
JSON arrays (reals as numbers, complex entries as [re, im] pairs).
Operator descriptors serialize to plain dicts for experiment configs.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .operators import (
    DenseOperator,
    GaussianOperator,
    IdentityOperator,
    PartialFourierOperator,
    SamplingOperator,
)

SIGNAL_MAGIC = b"CSK1"
MATRIX_MAGIC = b"CSKM"
_KIND_REAL = 0
_KIND_COMPLEX = 1


def write_signal(path, x) -> None:
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("signals are 1-D")
    complex_kind = np.iscomplexobj(x)
    with open(path, "wb") as fh:
        fh.write(SIGNAL_MAGIC)
        fh.write(struct.pack("<I", x.size))
        fh.write(struct.pack("<B", _KIND_COMPLEX if complex_kind else _KIND_REAL))
        if complex_kind:
            interleaved = np.empty(2 * x.size)
            interleaved[0::2] = x.real
            interleaved[1::2] = x.imag
            fh.write(interleaved.astype("<f8").tobytes())
        else:
            fh.write(x.astype("<f8").tobytes())


def read_signal(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != SIGNAL_MAGIC:
        raise ValueError(f"bad signal magic {raw[:4]!r}")
    (n,) = struct.unpack("<I", raw[4:8])
    (kind,) = struct.unpack("<B", raw[8:9])
    payload = raw[9:]
    if kind == _KIND_REAL:
        if len(payload) != 8 * n:
            raise ValueError("truncated real signal payload")
        return np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if kind == _KIND_COMPLEX:
        if len(payload) != 16 * n:
            raise ValueError("truncated complex signal payload")
        flat = np.frombuffer(payload, dtype="<f8")
        return (flat[0::2] + 1j * flat[1::2]).astype(np.complex128)
    raise ValueError(f"unknown scalar kind {kind}")


def write_matrix(path, matrix) -> None:
    mat = np.asarray(matrix)
    if mat.ndim != 2:
        raise ValueError("matrices are 2-D")
    m, n = mat.shape
    mat = mat.astype(np.complex128, copy=False)
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", m, n))
        interleaved = np.empty(2 * m * n)
        interleaved[0::2] = mat.real.ravel()
        interleaved[1::2] = mat.imag.ravel()
        fh.write(interleaved.astype("<f8").tobytes())


def read_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != MATRIX_MAGIC:
        raise ValueError(f"bad matrix magic {raw[:4]!r}")
    m, n = struct.unpack("<II", raw[4:12])
    payload = raw[12:]
    if len(payload) != 16 * m * n:
        raise ValueError("truncated matrix payload")
    flat = np.frombuffer(payload, dtype="<f8")
    mat = (flat[0::2] + 1j * flat[1::2]).reshape(m, n)
    if not mat.imag.any():
        return mat.real.astype(np.float64)
    return mat.astype(np.complex128)


def signal_to_json(x) -> list:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return [[float(v.real), float(v.imag)] for v in x]
    return [float(v) for v in x]


def signal_from_json(data) -> np.ndarray:
    if data and isinstance(data[0], (list, tuple)):
        return np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return np.array(data, dtype=np.float64)


def operator_descriptor(op: SamplingOperator) -> dict:
    """JSON-safe descriptor; dense matrices are inlined (small fixtures only)."""
    if isinstance(op, IdentityOperator):
        return {"kind": "identity", "n": op.n}
    if isinstance(op, GaussianOperator):
        return {"kind": "gaussian", "m": op.m, "n": op.n, "seed": op.seed}
    if isinstance(op, PartialFourierOperator):
        desc = {"kind": "partial_fourier", "m": op.m, "n": op.n}
        if op.seed is not None:
            desc["seed"] = op.seed
        else:
            desc["rows"] = [int(r) for r in op.rows]
        return desc
    if isinstance(op, DenseOperator):
        return {
            "kind": "dense",
            "m": op.m,
            "n": op.n,
            "matrix": [signal_to_json(row) for row in op.matrix],
        }
    raise TypeError(f"cannot describe operator {type(op).__name__}")


def operator_from_descriptor(desc: dict) -> SamplingOperator:
    kind = desc.get("kind")
    if kind == "identity":
        return IdentityOperator(int(desc["n"]))
    if kind == "gaussian":
        return GaussianOperator(int(desc["m"]), int(desc["n"]), int(desc["seed"]))
    if kind == "partial_fourier":
        rows = desc.get("rows")
        seed = desc.get("seed")
        return PartialFourierOperator(
            int(desc["m"]),
            int(desc["n"]),
            seed=None if seed is None else int(seed),
            rows=None if rows is None else np.asarray(rows, dtype=np.int64),
        )
    if kind == "dense":
        if "path" in desc:
            return DenseOperator(read_matrix(desc["path"]))
        rows = [signal_from_json(row) for row in desc["matrix"]]
        return DenseOperator(np.vstack(rows))
    raise ValueError(f"unknown operator kind {kind!r}")


def dump_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
