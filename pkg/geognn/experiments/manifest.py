"""Run manifest: what a command ran, with which config, and what it wrote."""

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from geognn.export import atomic_write_json

MANIFEST_NAME = "run_manifest.json"


@dataclass
class RunManifest:
    """
    Record of one CLI run, written atomically at the end of the run.

    Paths in `outputs` are relative to the output directory.
    """

    command: str
    config: dict
    config_hash: str
    seeds: list
    version: str
    outputs: list = field(default_factory=list)
    stages: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    checks: dict | None = None
    exit_code: int = 0

    @contextmanager
    def stage(self, name: str):
        """Time a block; the wall-clock seconds land in `stages[name]`."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = round(time.perf_counter() - start, 3)

    def add_output(self, path: str | Path, root: str | Path) -> None:
        self.outputs.append(Path(path).relative_to(root).as_posix())

    def add_warning(self, message) -> None:
        text = str(message)
        if text not in self.warnings:
            self.warnings.append(text)

    def write(self, out_dir: str | Path) -> Path:
        self.outputs = sorted(set(self.outputs))
        return atomic_write_json(Path(out_dir) / MANIFEST_NAME, asdict(self))


__all__ = ["MANIFEST_NAME", "RunManifest"]
