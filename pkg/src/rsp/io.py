"""On-disk formats.

Matrix, binary (``.bin``), all little-endian::

    b"RSPM" | version u16 (=1) | rows u64 | cols u64 | rows*cols f64, row-major

Matrix, text (``.csv``): one row per line, comma separated, every value
written with 17 significant digits so the round trip is exact.

Labels: one integer per line, no header.

JSON files are written via a temp file plus rename so readers never see a
partial file.
"""
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import RspError

MAGIC = b"RSPM"
VERSION = 1
_HEADER = struct.Struct("<4sHQQ")
FORMATS = ("bin", "csv")


class FormatError(RspError):
    pass


def matrix_path(directory, stem, fmt):
    return Path(directory) / f"{stem}.{fmt}"


def write_matrix(path, a, fmt=None):
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    a = np.ascontiguousarray(a, dtype="<f8")
    if a.ndim != 2:
        raise FormatError(f"only 2-D matrices can be stored, got {a.shape}")
    if fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, a.shape[0], a.shape[1]))
            fh.write(a.tobytes(order="C"))
    elif fmt == "csv":
        with open(path, "w", newline="\n") as fh:
            for row in a:
                fh.write(",".join(f"{x:.17g}" for x in row))
                fh.write("\n")
    else:
        raise FormatError(f"unknown matrix format {fmt!r}")
    return path


def read_matrix(path):
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if head[:4] == MAGIC:
            if len(head) < _HEADER.size:
                raise FormatError(f"{path}: truncated header")
            _, version, rows, cols = _HEADER.unpack(head)
            if version != VERSION:
                raise FormatError(f"{path}: unsupported version {version}")
            data = np.frombuffer(fh.read(), dtype="<f8")
            if data.size != rows * cols:
                raise FormatError(f"{path}: expected {rows * cols} values, found {data.size}")
            return data.reshape(rows, cols).astype(np.float64)
    try:
        a = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return a


def write_labels(path, labels):
    with open(path, "w", newline="\n") as fh:
        for x in np.asarray(labels, dtype=np.int64).ravel():
            fh.write(f"{int(x)}\n")
    return Path(path)


def read_labels(path):
    with open(path) as fh:
        try:
            return np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc


def write_vector(path, values):
    with open(path, "w", newline="\n") as fh:
        for x in values:
            fh.write(f"{float(x):.17g}\n")
    return Path(path)


def dump_json(path, obj):
    """Atomic write: temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")
