"""SVG line plots of median curves."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from geognn.experiments.results import ErrorCurve  # noqa: E402

SVG_SALT = "geognn"


def plot_medians(
    curve: ErrorCurve,
    metric: str,
    path: str | Path,
    by: str = "n",
    log: bool = True,
) -> Path | None:
    """
    One line per kernel (or family) of the per-n medians of `metric`.

    Returns:
        The written path, or None when the curve has no finite rows for it.
    """
    series = {kernel: curve.medians(metric, kernel, by=by) for kernel in curve.kernels()}
    series = {k: v for k, v in series.items() if v}
    if not series:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for kernel, medians in sorted(series.items()):
            xs, ys = list(medians), list(medians.values())
            ax.plot(xs, ys, marker="o", label=kernel)
        positive_x = all(x > 0 for m in series.values() for x in m)
        positive_y = all(y > 0 for m in series.values() for y in m.values())
        if log and positive_x and positive_y:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(by)
        ax.set_ylabel(f"median {metric}")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


__all__ = ["plot_medians"]
