"""Render benchmark CSV artifacts into tables and figures.

Reads the harness's documented file formats (runs.csv, table.csv and
traj/<run_id>.csv) and produces a markdown success-rate table, median
best-so-far convergence curves, and the warm-start-length sweep figure.
Rendering is a pure function of the input files and the spec; figures are
compared through the numeric series the render functions return.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

log = logging.getLogger(__name__)

ALGORITHM_ORDER = ("catcma", "ws", "hr", "icatcma")
DISPLAY_NAMES = {
    "catcma": "CatCMA",
    "ws": "WS-CatCMA",
    "hr": "HR-CatCMA",
    "icatcma": "ICatCMA",
}

# Display floor for log-scale objective axes.
Y_FLOOR = 1e-12


@dataclass(frozen=True)
class PlotSpec:
    """What to render, from where, with which filters."""

    input_dir: Path
    kind: str  # "table", "convergence" or "tfreeze-sweep"
    problem: str | None = None
    alphas: tuple[float, ...] = field(default=())
    algorithms: tuple[str, ...] = field(default=())
    out: Path | None = None
    image_format: str = "png"
    recompute: bool = False


def read_csv_rows(path: Path) -> list[dict]:
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def read_runs(spec: PlotSpec) -> list[dict]:
    rows = read_csv_rows(Path(spec.input_dir) / "runs.csv")
    for row in rows:
        row["alpha"] = float(row["alpha"])
        row["n"] = int(row["n"])
        row["m"] = int(row["m"])
        row["t_freeze"] = int(row["t_freeze"])
        row["evals_used"] = int(row["evals_used"])
        row["best_value"] = float(row["best_value"])
        row["success"] = row["success"] == "1"
    return _filter(rows, spec)


def _filter(rows: list[dict], spec: PlotSpec) -> list[dict]:
    out = rows
    if spec.problem:
        out = [r for r in out if r["problem"] == spec.problem]
    if spec.alphas:
        out = [r for r in out if float(r["alpha"]) in spec.alphas]
    if spec.algorithms:
        out = [r for r in out if r["algorithm"] in spec.algorithms]
    return out


def aggregate_runs(rows: list[dict]) -> list[dict]:
    """Recompute success rates from raw run rows (runs.csv schema)."""
    cells: dict[tuple, list[dict]] = {}
    for row in rows:
        cells.setdefault((row["problem"], row["alpha"], row["algorithm"]), []).append(row)
    order = {a: i for i, a in enumerate(ALGORITHM_ORDER)}
    table = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], order.get(k[2], len(order)), k[2])):
        cell = cells[key]
        evals = [r["evals_used"] for r in cell if r["success"]]
        table.append(
            {
                "problem": key[0],
                "alpha": key[1],
                "algorithm": key[2],
                "trials": len(cell),
                "success_rate": sum(r["success"] for r in cell) / len(cell),
                "median_evals": float(np.median(evals)) if evals else None,
            }
        )
    return table


def read_table(spec: PlotSpec) -> list[dict]:
    if spec.recompute:
        return aggregate_runs(read_runs(spec))
    rows = read_csv_rows(Path(spec.input_dir) / "table.csv")
    for row in rows:
        row["alpha"] = float(row["alpha"])
        row["trials"] = int(row["trials"])
        row["success_rate"] = float(row["success_rate"])
        row["median_evals"] = float(row["median_evals"]) if row["median_evals"] else None
    return _filter(rows, spec)


def _format_alpha(alpha: float) -> str:
    return f"{alpha:g}"


def render_table(spec: PlotSpec) -> str:
    """Markdown success-rate table: one row per algorithm, one column per
    alpha, cells to two decimals, missing cells rendered as an em dash."""
    rows = read_table(spec)
    alphas = sorted({row["alpha"] for row in rows})
    present = {row["algorithm"] for row in rows}
    algorithms = [a for a in ALGORITHM_ORDER if a in present]
    algorithms += sorted(present - set(ALGORITHM_ORDER))
    cells = {(row["algorithm"], row["alpha"]): row["success_rate"] for row in rows}

    header = "| algorithm | " + " | ".join(f"α={_format_alpha(a)}" for a in alphas) + " |"
    divider = "|---" * (len(alphas) + 1) + "|"
    lines = [header, divider]
    for algorithm in algorithms:
        rendered = [
            f"{cells[(algorithm, alpha)]:.2f}" if (algorithm, alpha) in cells else "—"
            for alpha in alphas
        ]
        lines.append(f"| {DISPLAY_NAMES.get(algorithm, algorithm)} | " + " | ".join(rendered) + " |")
    text = "\n".join(lines) + "\n"
    if spec.out is not None:
        Path(spec.out).write_text(text)
    return text


def _read_trajectory(path: Path) -> tuple[np.ndarray, np.ndarray]:
    rows = read_csv_rows(path)
    evals = np.array([int(r["evals"]) for r in rows], dtype=np.int64)
    best = np.array([float(r["best_f"]) for r in rows])
    return evals, best


def _step_interpolate(grid: np.ndarray, evals: np.ndarray, best: np.ndarray) -> np.ndarray:
    """Best-so-far as a right-continuous step function, held beyond the end."""
    idx = np.searchsorted(evals, grid, side="right") - 1
    values = np.full(grid.shape, np.nan)
    seen = idx >= 0
    values[seen] = best[np.clip(idx, 0, len(best) - 1)][seen]
    # before the first record the best is undefined; hold the first value
    values[~seen] = best[0]
    return values


def render_convergence(spec: PlotSpec) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Median best-so-far vs evaluations per algorithm, with faint
    per-trial overlays. Returns the plotted series per algorithm."""
    runs = read_runs(spec)
    traj_dir = Path(spec.input_dir) / "traj"
    by_algorithm: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}
    for row in runs:
        path = traj_dir / f"{row['run_id']}.csv"
        if not path.exists():
            continue
        by_algorithm.setdefault(row["algorithm"], []).append(_read_trajectory(path))

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    series: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    wanted = spec.algorithms or [a for a in ALGORITHM_ORDER if a in by_algorithm]
    for algorithm in wanted:
        trajectories = by_algorithm.get(algorithm, [])
        if not trajectories:
            log.warning("no trajectories for algorithm %r; curve skipped", algorithm)
            continue
        grid = np.unique(np.concatenate([t[0] for t in trajectories]))
        stacked = np.stack([_step_interpolate(grid, e, b) for e, b in trajectories])
        median = np.median(stacked, axis=0)
        series[algorithm] = (grid, median)
        color = f"C{ALGORITHM_ORDER.index(algorithm) if algorithm in ALGORITHM_ORDER else 9}"
        for row_values in stacked:
            ax.plot(grid, np.maximum(row_values, Y_FLOOR), color=color, alpha=0.15, lw=0.6)
        ax.plot(grid, np.maximum(median, Y_FLOOR), color=color, lw=1.8,
                label=DISPLAY_NAMES.get(algorithm, algorithm))
    ax.set_yscale("log")
    ax.set_xlabel("evaluations")
    ax.set_ylabel("best objective value")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if spec.out is not None:
        fig.savefig(spec.out, format=spec.image_format, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return series


def _sweep_factor(row: dict) -> float:
    """Recover the adaptive warm-start factor A from a runs.csv row.

    The harness records the resolved iteration count t_freeze =
    floor(A * 100 * l / lambda) with l = n(m+1) for the variants using the
    hyper-representation and lambda = 4 + floor(3 ln l); inverting loses
    only the floor rounding.
    """
    l = row["n"] * (row["m"] + 1) if row["algorithm"] in ("hr", "icatcma") else row["n"]
    lam = 4 + int(3 * math.log(l))
    return round(row["t_freeze"] * lam / (100.0 * l), 2)


def render_tfreeze_sweep(spec: PlotSpec) -> tuple[np.ndarray, np.ndarray]:
    """Success rate against the adaptive warm-start factor A."""
    runs = read_runs(spec)
    if not runs:
        raise ValueError(
            "no runs match the filter "
            f"(problem={spec.problem!r}, alphas={spec.alphas!r}, algorithms={spec.algorithms!r})"
        )
    cells: dict[float, list[bool]] = {}
    for row in runs:
        cells.setdefault(_sweep_factor(row), []).append(row["success"])
    factors = np.array(sorted(cells))
    rates = np.array([sum(cells[a]) / len(cells[a]) for a in factors])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(factors, rates, marker="o")
    ax.set_xlabel("warm-start factor A")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    if spec.out is not None:
        fig.savefig(spec.out, format=spec.image_format, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return factors, rates
