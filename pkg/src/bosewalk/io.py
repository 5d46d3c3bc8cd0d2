"""CSV, JSON and PGM writers used by the command-line interface."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

__all__ = ["write_csv", "read_csv", "write_json", "write_pgm", "read_pgm", "pgm_pixels", "to_jsonable"]


def _fmt(x):
    return repr(float(x))


def write_csv(path, values, header=None):
    """Write a vector or matrix with a header row of column labels.

    Values use ``repr`` so the text round-trips to the same doubles.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if header is None:
        header = list(range(values.shape[1]))
    lines = [",".join(str(h) for h in header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path):
    """Inverse of :func:`write_csv`; returns ``(header, values)``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    values = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, values


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return x
    return obj


def write_json(path, obj):
    Path(path).write_text(
        json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def pgm_pixels(values):
    """Quantize a matrix to 8-bit gray levels.

    Nonnegative matrices map ``[0, max]`` onto ``0..255``. Matrices with
    negative entries map ``[-max|v|, max|v|]`` onto ``0..255`` so that zero sits
    at mid-gray. Returns ``(pixels, normalization)``, where ``normalization``
    records how to undo the mapping.
    """
    v = np.asarray(values, dtype=float)
    signed = bool(np.any(v < 0))
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    if scale == 0:
        pix = np.zeros(v.shape, dtype=np.uint8)
    elif signed:
        pix = np.rint(255.0 * (v / scale + 1.0) / 2.0).astype(np.uint8)
    else:
        pix = np.rint(255.0 * v / scale).astype(np.uint8)
    return pix, {"scale": scale, "signed": signed, "levels": 255}


def write_pgm(path, values):
    """Binary (P5) grayscale heatmap, row-major; returns the normalization."""
    pix, norm = pgm_pixels(values)
    rows, cols = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pix).tobytes())
    return norm


def read_pgm(path):
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path} is not a binary PGM file")
    cols, rows, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM files are supported")
    body = data[len(data) - rows * cols :]
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
