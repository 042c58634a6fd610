"""CSV and JSON serialization of realizations, series and reports.

Floats are written with 17 significant digits so that every value reads
back bit-identical.
"""
from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import NonNumeric, ShapeError
from .grid import INCREMENTS, MEASURE, MixedGrid, Realization

FMT = "{:.17g}"


def _num(v):
    return FMT.format(float(v))


def write_realization(real, path):
    """Write ``real`` as rows ``j,k,value`` (block, cell, finest-scale value).

    ``path`` may also be an open text file.
    """
    L, N = real.values.shape
    rows = (f"{j},{k},{_num(v)}\n" for j in range(L) for k, v in enumerate(real.values[j]))
    if hasattr(path, "write"):
        path.write("j,k,value\n")
        path.writelines(rows)
        return
    with open(path, "w", newline="") as fh:
        fh.write("j,k,value\n")
        fh.writelines(rows)


def _read_columns(path, wanted):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ShapeError(f"{path}: empty file") from None
        missing = [w for w in wanted if w not in header]
        if missing:
            raise ShapeError(f"{path}: missing column(s) {missing}")
        idx = [header.index(w) for w in wanted]
        cols = [[] for _ in wanted]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            for c, i in zip(cols, idx):
                try:
                    v = float(row[i])
                except (ValueError, IndexError):
                    raise NonNumeric(f"{path}, line {lineno}: non-numeric value "
                                     f"{row[i] if i < len(row) else ''!r}") from None
                if not math.isfinite(v):
                    raise NonNumeric(f"{path}, line {lineno}: non-finite value")
                c.append(v)
    return [np.asarray(c) for c in cols]


def _log2_exact(count, what):
    n = int(round(math.log2(count))) if count > 0 else -1
    if n < 0 or 2 ** n != count:
        raise ShapeError(f"{what} = {count} is not a power of two")
    return n


def read_realization(path, kind=None, T=1.0, chi=0.0):
    """Read a ``j,k,value`` CSV back into a :class:`Realization`.

    ``kind`` defaults to ``"measure"`` when every value is nonnegative.
    """
    j, k, v = _read_columns(path, ("j", "k", "value"))
    L = int(j.max()) + 1 if j.size else 0
    N = int(k.max()) + 1 if k.size else 0
    n = _log2_exact(N, "cells per block")
    if v.size != L * N:
        raise ShapeError(f"{path}: expected {L * N} rows, got {v.size}")
    values = np.empty((L, N))
    values[j.astype(int), k.astype(int)] = v
    if kind is None:
        kind = MEASURE if np.all(v >= 0) else INCREMENTS
    return Realization(values, MixedGrid(n, chi, T, L), kind, None, {"source": str(path)})


def ingest_series(path, format="increments", L=None, T=1.0, chi=0.0):
    """Read an observed series from column ``x`` of a CSV file.

    ``format="levels"`` first-differences the values.  The increments are
    cut into ``L`` equal blocks (default 1) of ``2**n`` values each.
    """
    if format not in ("increments", "levels"):
        raise ValueError("format must be 'increments' or 'levels'")
    (x,) = _read_columns(path, ("x",))
    if format == "levels":
        x = np.diff(x)
    L = 1 if L is None else int(L)
    if L < 1 or x.size % L:
        raise ShapeError(f"{x.size} increments cannot be split into {L} blocks")
    n = _log2_exact(x.size // L, "increments per block")
    kind = MEASURE if np.all(x >= 0) else INCREMENTS
    return Realization(x.reshape(L, -1), MixedGrid(n, chi, T, L), kind, None,
                       {"source": str(path), "format": format})


# ---------------------------------------------------------------------------
# reports

def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text


def write_estimate(report, path=None, fmt="json"):
    """Serialize an :class:`EstimateReport`; one CSV row per q."""
    if fmt == "json":
        return _dump_json(report.as_dict(), path)
    d = report.as_dict()
    cols = ["q", "zeta", "zeta_tilde", "zeta_hat", "rate_exponent", "stderr"]
    lines = [",".join(cols + ["method"])]
    for r in range(len(d["q"])):
        lines.append(",".join("" if d[c][r] is None else _num(d[c][r]) for c in cols)
                     + f",{d['method']}")
    return _write_lines(lines, path)


def _write_lines(lines, path):
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def write_mc_reports(reports, path=None, fmt="json"):
    """Serialize McReports: JSON list, or flat CSV with one row per replication."""
    if fmt == "json":
        return _dump_json([r.as_dict() for r in reports], path)
    lines = ["estimator,q,n,replication,value,standardized,truth"]
    for rep in reports:
        for i, (v, z) in enumerate(zip(rep.samples, rep.standardized)):
            lines.append(f"{rep.estimator},{_num(rep.q)},{rep.n},{i},{_num(v)},{_num(z)},"
                         f"{_num(rep.truth)}")
    return _write_lines(lines, path)


def read_mc_reports(path):
    with open(path) as fh:
        data = json.load(fh)
    return data if isinstance(data, list) else [data]
