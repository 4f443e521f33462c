"""Reader for OFF mesh files (vertices only)."""

import os

import numpy as np

from geognn.errors import CountMismatchError, MalformedHeaderError, NonNumericError
from geognn.geograph.graph import PointCloud

HEADERS = ("OFF", "COFF", "NOFF")


def _content_lines(text: str):
    """Yield (line number, stripped text) for lines that are not blank or comments."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_off(text: str) -> np.ndarray:
    """
    Parse OFF text into a (V, 3) vertex array.

    The header is "OFF" (or COFF/NOFF) on its own line, optionally followed by
    the counts on the same line. Faces are ignored.

    Raises:
        MalformedHeaderError: Missing header or unreadable counts.
        CountMismatchError: Fewer vertex lines than announced.
        NonNumericError: A vertex line that is not three numbers.
    """
    lines = _content_lines(text)

    first = next(lines, None)
    if first is None:
        raise MalformedHeaderError(1, "empty file, expected an OFF header")
    number, line = first
    tokens = line.split()
    # Some ModelNet files glue the counts to the header ("OFF490 518 0").
    for header in HEADERS:
        rest = tokens[0][len(header):]
        if tokens[0].startswith(header) and rest.isdigit():
            tokens = [header, rest] + tokens[1:]
            break
    if tokens[0] not in HEADERS:
        raise MalformedHeaderError(number, f"expected OFF header, got {tokens[0]!r}")

    counts = tokens[1:]
    counts_line = number
    if not counts:
        nxt = next(lines, None)
        if nxt is None:
            raise MalformedHeaderError(number + 1, "missing vertex/face counts")
        counts_line, counts_text = nxt
        counts = counts_text.split()
    try:
        n_vertices = int(counts[0])
    except (IndexError, ValueError):
        raise MalformedHeaderError(counts_line, f"unreadable counts {' '.join(counts)!r}")
    if n_vertices < 1:
        raise MalformedHeaderError(counts_line, f"vertex count must be positive, got {n_vertices}")

    vertices = np.empty((n_vertices, 3))
    last = counts_line
    for i in range(n_vertices):
        nxt = next(lines, None)
        if nxt is None:
            raise CountMismatchError(
                last + 1,
                f"header announces {n_vertices} vertices, file has {i}",
            )
        last, line = nxt
        parts = line.split()
        try:
            coords = [float(v) for v in parts[:3]]
        except ValueError:
            raise NonNumericError(last, f"non-numeric vertex coordinates {line!r}")
        if len(coords) < 3 or not np.all(np.isfinite(coords)):
            raise NonNumericError(last, f"expected three finite coordinates, got {line!r}")
        vertices[i] = coords
    return vertices


def off_load(path, n: int | None = None, seed=None) -> PointCloud:
    """
    Load the vertices of an OFF file as a point cloud.

    Args:
        path: File path.
        n: Optional size of a uniform subsample without replacement.
        seed: Seed of the subsample.

    Returns:
        PointCloud with source "external".
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"OFF file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    cloud = PointCloud(parse_off(text), source="external")
    if n is not None and n < cloud.n:
        cloud = cloud.subsample(n, seed)
    elif n is not None and n > cloud.n:
        raise ValueError(f"requested {n} points but {path} has {cloud.n} vertices")
    return cloud


__all__ = ["parse_off", "off_load"]
