"""Error rows and curves produced by the experiment sweeps."""

import math
from collections import defaultdict
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path

import numpy as np

from geognn.export import read_csv, write_csv

CELL_ERROR = "cell_error"


@dataclass(frozen=True)
class ErrorRow:
    """
    One measured quantity of one job cell.

    `param` carries the swept scalar of a cell when there is one (penalty
    weight C_L, training size n_1); it is NaN otherwise.
    """

    n: int
    seed: int
    eps: float
    kernel: str
    metric: str
    value: float
    M: int
    config_hash: str
    param: float = math.nan
    note: str = ""

    def sort_key(self) -> tuple:
        param = -math.inf if math.isnan(self.param) else self.param
        return (self.metric, self.kernel, param, self.n, self.seed)


COLUMNS = tuple(f.name for f in fields(ErrorRow))


def _parse_row(raw: dict) -> ErrorRow:
    return ErrorRow(
        n=int(raw["n"]),
        seed=int(raw["seed"]),
        eps=float(raw["eps"]),
        kernel=raw["kernel"],
        metric=raw["metric"],
        value=float(raw["value"]),
        M=int(raw["M"]),
        config_hash=raw["config_hash"],
        param=float(raw["param"]) if raw.get("param") else math.nan,
        note=raw.get("note", ""),
    )


@dataclass
class ErrorCurve:
    """Rows of a sweep; medians are taken over seeds."""

    rows: list = field(default_factory=list)
    config_hash: str = ""

    def add(self, row: ErrorRow) -> None:
        self.rows.append(row)

    def extend(self, rows) -> None:
        self.rows.extend(rows)

    def sorted(self) -> "ErrorCurve":
        return ErrorCurve(sorted(self.rows, key=ErrorRow.sort_key), self.config_hash)

    @property
    def failures(self) -> list[ErrorRow]:
        return [r for r in self.rows if r.metric == CELL_ERROR]

    def metrics(self) -> list[str]:
        return sorted({r.metric for r in self.rows if r.metric != CELL_ERROR})

    def kernels(self) -> list[str]:
        return sorted({r.kernel for r in self.rows})

    def select(self, metric: str, kernel: str | None = None, param: float | None = None) -> list[ErrorRow]:
        return [
            r for r in self.rows
            if r.metric == metric
            and (kernel is None or r.kernel == kernel)
            and (param is None or r.param == param)
            and math.isfinite(r.value)
        ]

    def seeds_per_n(self, metric: str, kernel: str | None = None) -> dict[int, int]:
        counts = defaultdict(set)
        for r in self.select(metric, kernel):
            counts[r.n].add(r.seed)
        return {n: len(s) for n, s in sorted(counts.items())}

    def medians(self, metric: str, kernel: str | None = None, by: str = "n") -> dict:
        """Median value per n (or per `param` with by="param") over seeds."""
        groups = defaultdict(list)
        for r in self.select(metric, kernel):
            groups[getattr(r, by)].append(r.value)
        return {key: float(np.median(values)) for key, values in sorted(groups.items())}

    def summary(self, by: str = "n") -> dict:
        """Nested medians {kernel: {metric: {key: median}}} for the JSON summary."""
        out = {}
        for kernel in self.kernels():
            per_metric = {}
            for metric in self.metrics():
                medians = self.medians(metric, kernel, by=by)
                if medians:
                    per_metric[metric] = {format(key, "g"): v for key, v in medians.items()}
            if per_metric:
                out[kernel] = per_metric
        return {
            "config_hash": self.config_hash,
            "rows": len(self.rows),
            "failures": len(self.failures),
            "medians": out,
        }

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(path, COLUMNS, (astuple(r) for r in self.sorted().rows))

    @classmethod
    def from_csv(cls, path: str | Path) -> "ErrorCurve":
        rows = [_parse_row(raw) for raw in read_csv(path)]
        hashes = {r.config_hash for r in rows}
        return cls(rows, hashes.pop() if len(hashes) == 1 else "")


__all__ = ["CELL_ERROR", "COLUMNS", "ErrorRow", "ErrorCurve"]
