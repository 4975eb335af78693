"""Dataset text format, JSON reports and CSV tables.

Dataset layout::

    #ECLIPSE-BCN v1
    {"p": 100, "q": 5, "N": 1000, "rows_used": 4, "snr": null, "seed": 7, "truth": {...}}
    0100...   <- one line per snapshot, rows_used * p characters, row-major

``snr`` is ``null`` for noise-free data. Vertex indices in ``truth`` are 0-based.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError
from .graph import GraphSequence, GroundTruth

__all__ = ["MAGIC", "write_dataset", "read_dataset", "write_json", "read_json", "write_csv"]

MAGIC = "#ECLIPSE-BCN v1"


def _header(seq: GraphSequence) -> dict:
    return {
        "p": seq.p,
        "q": seq.q,
        "N": seq.N,
        "rows_used": seq.rows_used,
        "snr": None if math.isinf(seq.snr) else seq.snr,
        "seed": seq.seed,
        "truth": None if seq.truth is None else seq.truth.to_dict(),
    }


def write_dataset(seq: GraphSequence, path) -> None:
    lines = (seq.data.reshape(seq.N, -1) + ord("0")).astype(np.uint8)
    with open(path, "w", newline="\n") as fh:
        fh.write(MAGIC + "\n")
        fh.write(json.dumps(_header(seq), sort_keys=True) + "\n")
        for row in lines:
            fh.write(row.tobytes().decode("ascii"))
            fh.write("\n")


def read_dataset(path) -> GraphSequence:
    with open(path) as fh:
        magic = fh.readline().rstrip("\n")
        if magic != MAGIC:
            raise DatasetFormatError(f"{path}: not a dataset file (bad magic {magic[:40]!r})")
        try:
            head = json.loads(fh.readline())
            p, q, N, rows = (int(head[k]) for k in ("p", "q", "N", "rows_used"))
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetFormatError(f"{path}: malformed header: {exc}") from exc
        body = [line.rstrip("\n") for line in fh if line.strip()]
    if len(body) != N:
        raise DatasetFormatError(f"{path}: header says N={N} but found {len(body)} snapshot lines")
    width = rows * p
    for i, line in enumerate(body):
        if len(line) != width:
            raise DatasetFormatError(f"{path}: line {i + 3} has {len(line)} entries, expected {width}")
    raw = np.frombuffer("".join(body).encode("ascii"), dtype=np.uint8) - ord("0")
    if raw.size and raw.max() > 1:
        raise DatasetFormatError(f"{path}: entries must be '0' or '1'")
    snr = head.get("snr")
    truth = head.get("truth")
    return GraphSequence(
        data=raw.reshape(N, rows, p),
        p=p,
        q=q,
        truth=None if truth is None else GroundTruth.from_dict(truth),
        seed=head.get("seed"),
        snr=float("inf") if snr is None else float(snr),
    )


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(obj, path) -> None:
    """Write ``obj`` as JSON; non-finite floats become ``null``."""
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header, columns) -> None:
    """Write equally long columns under ``header``."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
