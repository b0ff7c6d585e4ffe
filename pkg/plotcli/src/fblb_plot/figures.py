"""Render the four experiment figures from harness result CSVs.

Each figure kind knows which columns it needs and fails with a SchemaError
naming the first missing or non-numeric column.  Rendering is deterministic:
a fixed style, a fixed SVG hash salt, and no embedded timestamps, so the same
input file always produces byte-identical output.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["FigureSpec", "SchemaError", "EmptyInputError", "KINDS", "render"]

KINDS = ("separation", "concentration", "leakage", "arbitration")

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "svg.hashsalt": "fblb-plot",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}

# column -> parser; None keeps the raw string
_REQUIRED = {
    "separation": {
        "algorithm": None, "T": float, "eps": float,
        "excess_mean": float, "excess_std_error": float,
    },
    "concentration": {
        "n": float, "T": float, "d": float,
        "empirical": float, "exact": float, "std_error": float,
    },
    "leakage": {
        "d2": float, "c": float, "empirical_prob": float,
        "bound_rhs": float, "trials": float,
    },
    "arbitration": {
        "d2": float, "divergences": float,
    },
}


class SchemaError(ValueError):
    """The CSV does not carry the columns (or values) the figure needs."""


class EmptyInputError(ValueError):
    """The CSV has no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    x_scale: str | None = None
    y_scale: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        suffix = Path(self.out_path).suffix.lower()
        if suffix not in (".svg", ".png"):
            raise ValueError(f"output must be .svg or .png, got {suffix!r}")


def _load_rows(spec: FigureSpec) -> list[dict]:
    with open(spec.csv_path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        required = _REQUIRED[spec.kind]
        for column in required:
            if column not in header:
                raise SchemaError(
                    f"{spec.kind} figure needs column '{column}', "
                    f"but the CSV has {header}"
                )
        rows = []
        for line_number, raw in enumerate(reader, start=2):
            if any(raw.get(c) in (None, "") for c in required):
                continue  # skipped grid points carry empty metric fields
            row = {}
            for column, parse in required.items():
                value = raw[column]
                if parse is None:
                    row[column] = value
                    continue
                try:
                    row[column] = parse(value)
                except ValueError as error:
                    raise SchemaError(
                        f"column '{column}' has non-numeric value {value!r} "
                        f"on line {line_number}"
                    ) from error
            rows.append(row)
    if not rows:
        raise EmptyInputError(f"{spec.csv_path} contains no usable data rows")
    return rows


def _group(rows: list[dict], key):
    grouped: dict = {}
    for row in rows:
        grouped.setdefault(key(row), []).append(row)
    return dict(sorted(grouped.items()))


def _mean_se(values: list[float]) -> tuple[float, float]:
    if len(values) == 1:
        return values[0], 0.0
    return statistics.fmean(values), statistics.stdev(values) / math.sqrt(len(values))


def _plot_separation(ax, rows):
    for algorithm, bucket in _group(rows, lambda r: r["algorithm"]).items():
        xs, ys, errs = [], [], []
        for T, points in _group(bucket, lambda r: r["T"]).items():
            mean, se = _mean_se([p["excess_mean"] for p in points])
            if len(points) == 1:
                se = points[0]["excess_std_error"]
            xs.append(T)
            ys.append(mean)
            errs.append(se)
        ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, label=algorithm)
    for eps in sorted({r["eps"] for r in rows}):
        ts = sorted({r["T"] for r in rows})
        floor = [eps / 8.0 + min(1.0 - 2.0 * eps * eps * math.sqrt(t), 0.0) for t in ts]
        ax.plot(ts, floor, linestyle="--", color="black",
                label=f"eps/8 + min(1-2eps^2 sqrt(T), 0), eps={eps:g}")
    ax.set_xlabel("oracle budget T")
    ax.set_ylabel("excess population risk")
    ax.set_title("excess risk vs. oracle budget")
    ax.legend(fontsize=8)


def _plot_concentration(ax, rows):
    for n, bucket in _group(rows, lambda r: r["n"]).items():
        xs = [r["T"] for r in bucket]
        ax.errorbar(
            xs, [r["empirical"] for r in bucket],
            yerr=[3 * r["std_error"] for r in bucket],
            marker="o", capsize=3, label=f"empirical, n={n:g}",
        )
        ax.plot(xs, [r["exact"] for r in bucket], linestyle=":", marker="x",
                label=f"exact binomial tail, n={n:g}")
    ax.axhline(0.75, color="black", linestyle="--", label="3/4 floor")
    ax.set_xlabel("oracle budget T")
    ax.set_ylabel("Pr(|I(S)| > 2T)")
    ax.set_title("survivor-set concentration")
    ax.legend(fontsize=8)


def _plot_leakage(ax, rows):
    floor = 1.0 / (10.0 * max(r["trials"] for r in rows))
    for d2, bucket in _group(rows, lambda r: r["d2"]).items():
        bucket = sorted(bucket, key=lambda r: r["c"])
        xs = [r["c"] for r in bucket]
        ax.plot(xs, [max(r["empirical_prob"], floor) for r in bucket],
                marker="o", label=f"empirical, d2={d2:g}")
        ax.plot(xs, [max(r["bound_rhs"], floor) for r in bucket],
                linestyle="--", label=f"tail bound, d2={d2:g}")
    ax.set_yscale("log")
    ax.set_xlabel("threshold c")
    ax.set_ylabel("Pr(leakage > c)")
    ax.set_title("projection leakage tail (values floored for log display)")
    ax.legend(fontsize=8)


def _plot_arbitration(ax, rows):
    grouped = _group(rows, lambda r: r["d2"])
    xs = list(grouped)
    medians = [statistics.median(r["divergences"] for r in bucket)
               for bucket in grouped.values()]
    ax.plot(xs, medians, marker="o", label="median divergences")
    ax.set_xscale("log")
    ax.set_xlabel("embedding dimension d2")
    ax.set_ylabel("diverging oracle answers (of T)")
    ax.set_title("arbitrated-oracle divergence vs. embedding dimension")
    ax.legend(fontsize=8)


_PLOTTERS = {
    "separation": _plot_separation,
    "concentration": _plot_concentration,
    "leakage": _plot_leakage,
    "arbitration": _plot_arbitration,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the output path."""
    rows = _load_rows(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_STYLE):
        figure, ax = plt.subplots()
        try:
            _PLOTTERS[spec.kind](ax, rows)
            if spec.x_scale:
                ax.set_xscale(spec.x_scale)
            if spec.y_scale:
                ax.set_yscale(spec.y_scale)
            figure.tight_layout()
            figure.savefig(out, metadata=_clean_metadata(out))
        finally:
            plt.close(figure)
    return out


def _clean_metadata(out: Path) -> dict | None:
    # strip the creation timestamp so identical inputs give identical bytes
    if out.suffix.lower() == ".svg":
        return {"Date": None}
    return None
