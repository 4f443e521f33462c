"""
Plain-text exports: CSV tables, JSON summaries and model checkpoints.

Every writer goes through a temporary file and os.replace, so a file is
either absent or complete. Floats are written with repr precision so that
identical runs give byte-identical files.
"""

import csv
import io
import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from geognn.filters.coeffs import FilterCoeffs
from geognn.geograph.graph import GeoGraph
from geognn.gnn.arch import GnnArch, Nonlinearity, Readout
from geognn.spectral.alignment import AlignmentReport
from geognn.spectral.eig import Spectrum

CHECKPOINT_MAGIC = "# geognn checkpoint v1"


def fmt(value) -> str:
    """Format one CSV cell; floats use 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return "" if value is None else str(value)


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(str(tmp), str(path))
    return path


def atomic_write_json(path: str | Path, obj) -> Path:
    return atomic_write_text(
        path, json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_jsonable) + "\n"
    )


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def read_csv(path: str | Path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_edges(path: str | Path, g: GeoGraph) -> Path:
    """Edge list `i,j,weight` with i < j."""
    i, j, w = g.edges()
    return write_csv(path, ("i", "j", "weight"), zip(i, j, w))


def write_spectrum(path: str | Path, spectrum: Spectrum) -> Path:
    """Eigenvalues `index,eigenvalue`, 1-based."""
    rows = ((i + 1, lam) for i, lam in enumerate(spectrum.eigenvalues))
    return write_csv(path, ("index", "eigenvalue"), rows)


def write_alignment(path: str | Path, report: AlignmentReport) -> Path:
    return write_csv(path, ("i", "a_i", "eval_err", "efun_err", "op_err"), report.rows())


def write_filter(path: str | Path, h: FilterCoeffs) -> Path:
    return write_csv(path, ("k", "h_k"), h.to_rows())


def read_filter(path: str | Path, T_s: float = 1.0) -> FilterCoeffs:
    rows = sorted(read_csv(path), key=lambda r: int(r["k"]))
    if [int(r["k"]) for r in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: filter rows must list k = 0, 1, ... without gaps")
    return FilterCoeffs([float(r["h_k"]) for r in rows], T_s=T_s)


def write_loss(path: str | Path, history) -> Path:
    """Loss trajectory `epoch,loss,penalty`."""
    return write_csv(
        path, ("epoch", "loss", "penalty"), ((r.epoch, r.loss, r.penalty) for r in history)
    )


def write_checkpoint(path: str | Path, arch: GnnArch) -> Path:
    """
    Save an architecture as a commented JSON header followed by rows
    `tensor,index,value`.

    Banks are stored per (layer, p, q, k); the readout as W (row, col) and b.
    """
    header = json.dumps(arch.to_dict(), sort_keys=True)
    lines = [CHECKPOINT_MAGIC, f"# {header}", "tensor,index,value"]
    for name, value in arch.parameters().items():
        for index in np.ndindex(value.shape):
            lines.append(f"{name},{':'.join(map(str, index))},{fmt(value[index])}")
    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_checkpoint(path: str | Path) -> GnnArch:
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if len(lines) < 3 or lines[0] != CHECKPOINT_MAGIC or not lines[1].startswith("# "):
        raise ValueError(f"{path}: not a geognn checkpoint")
    meta = json.loads(lines[1][2:])
    widths = meta["widths"]
    banks = [
        np.zeros((f_out, f_in, K_t))
        for f_in, f_out, K_t in zip(widths[:-1], widths[1:], meta["K_t"])
    ]
    readout = None
    if meta["readout"] is not None:
        out_dim = meta["readout"]["out_dim"]
        readout = Readout(np.zeros((widths[-1], out_dim)), np.zeros(out_dim), meta["readout"]["pool"])
    arch = GnnArch(widths, banks, Nonlinearity(meta["nonlinearity"]), readout, meta["T_s"])
    params = arch.parameters()
    for row in csv.DictReader(lines[2:]):
        index = tuple(int(i) for i in row["index"].split(":"))
        params[row["tensor"]][index] = float(row["value"])
    arch.set_parameters(params)
    return arch


__all__ = [
    "fmt",
    "atomic_write_text",
    "atomic_write_json",
    "csv_text",
    "write_csv",
    "read_csv",
    "write_edges",
    "write_spectrum",
    "write_alignment",
    "write_filter",
    "read_filter",
    "write_loss",
    "write_checkpoint",
    "read_checkpoint",
]
