"""Benchmark harness: seeded trial grids, records, aggregation, CSV output.

A suite runs a grid of (alpha, trial) cells. Each cell generates one
problem instance that every algorithm variant shares; every run gets its
own RNG stream. Records land in runs.csv, aggregated success rates in
table.csv, and optional best-so-far trajectories under traj/, all
deterministically reproducible from the configuration (timing aside).
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import RunAborted
from .problems import KINDS, Objective, ProblemInstance, generate_instance
from .treatments import CatCMAVariant, WarmStartConfig, make_icatcma

log = logging.getLogger(__name__)

# Algorithm token -> (use warm-starting, use hyper-representation).
VARIANT_FLAGS = {
    "catcma": (False, False),
    "ws": (True, False),
    "hr": (False, True),
    "icatcma": (True, True),
}
ALGORITHMS = tuple(VARIANT_FLAGS)

RUNS_COLUMNS = (
    "run_id",
    "problem",
    "n",
    "m",
    "alpha",
    "algorithm",
    "t_freeze",
    "instance_seed",
    "run_seed",
    "evals_used",
    "best_value",
    "success",
    "wall_ms",
)
TABLE_COLUMNS = ("problem", "alpha", "algorithm", "trials", "success_rate", "median_evals")


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one benchmark suite."""

    problem: str
    n: int
    m: int
    alphas: tuple[float, ...] = (1.0,)
    algorithms: tuple[str, ...] = ALGORITHMS
    trials: int = 100
    budget: int = 10**6
    target: float = 1e-10
    t_freeze: WarmStartConfig = field(default_factory=WarmStartConfig.adaptive)
    seed: int = 1
    traj: bool = False
    workers: int = 1
    out: str = "results"

    def __post_init__(self) -> None:
        if self.problem not in KINDS:
            raise ValueError(f"unknown problem {self.problem!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.target <= 0.0:
            raise ValueError("target must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        unknown = [a for a in self.algorithms if a not in VARIANT_FLAGS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; expected subset of {ALGORITHMS}")
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alpha values must be distinct")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must be distinct")


@dataclass
class RunRecord:
    """Outcome of a single seeded run."""

    run_id: str
    problem: str
    n: int
    m: int
    alpha: float
    algorithm: str
    t_freeze: int
    instance_seed: int
    run_seed: int
    evals_used: int
    best_value: float
    success: bool
    wall_ms: float
    trajectory: tuple[np.ndarray, np.ndarray] | None = None
    diagnostic: str = ""


def stable_seed(*parts) -> int:
    """Deterministic 64-bit seed from the string forms of the parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _format_alpha(alpha: float) -> str:
    return str(int(alpha)) if alpha == int(alpha) else repr(alpha)


def _run_id(problem: str, alpha: float, algorithm: str, trial: int) -> str:
    return f"{problem}-a{_format_alpha(alpha)}-{algorithm}-t{trial:03d}"


def run_single(algorithm: str, instance: ProblemInstance, config: RunConfig, run_seed: int, trial: int = 0) -> RunRecord:
    """Execute one variant on one instance until termination."""
    use_ws, use_hr = VARIANT_FLAGS[algorithm]
    driver = make_icatcma(
        Objective(instance),
        instance.n,
        instance.m,
        use_ws=use_ws,
        use_hr=use_hr,
        ws_config=config.t_freeze,
        rng=np.random.default_rng(run_seed),
    )
    started = time.perf_counter()
    diagnostic = ""
    try:
        outcome = driver.run(config.budget, config.target, record_trajectory=config.traj)
        evals_used, best_value, success = outcome.evals_used, outcome.best_value, outcome.success
        trajectory = outcome.trajectory
    except RunAborted as abort:
        log.warning("run %s aborted: %s", _run_id(instance.kind, instance.alpha, algorithm, trial), abort)
        diagnostic = abort.tag
        evals_used = driver.evals_used
        best_value = driver.best_value
        success = False
        trajectory = None
    wall_ms = (time.perf_counter() - started) * 1e3
    return RunRecord(
        run_id=_run_id(instance.kind, instance.alpha, algorithm, trial),
        problem=instance.kind,
        n=instance.n,
        m=instance.m,
        alpha=instance.alpha,
        algorithm=algorithm,
        t_freeze=driver.t_freeze,
        instance_seed=instance.seed,
        run_seed=run_seed,
        evals_used=evals_used,
        best_value=best_value,
        success=success,
        wall_ms=wall_ms,
        trajectory=trajectory,
        diagnostic=diagnostic,
    )


def _trial_seeds(config: RunConfig, alpha: float, trial: int) -> tuple[int, dict[str, int]]:
    instance_seed = stable_seed(config.seed, config.problem, repr(float(alpha)), trial)
    run_seeds = {algo: stable_seed(instance_seed, algo) for algo in config.algorithms}
    return instance_seed, run_seeds


def _run_trial(args: tuple[RunConfig, float, int]) -> list[RunRecord]:
    """All algorithm runs of one (alpha, trial) cell, on a shared instance."""
    config, alpha, trial = args
    instance_seed, run_seeds = _trial_seeds(config, alpha, trial)
    instance = generate_instance(config.problem, config.n, config.m, alpha, instance_seed)
    return [
        run_single(algorithm, instance, config, run_seeds[algorithm], trial)
        for algorithm in config.algorithms
    ]


def run_suite(config: RunConfig, progress=None) -> list[RunRecord]:
    """Run the full (alpha, trial, algorithm) grid of the configuration.

    Trials are independent and may run in worker processes; each trial is
    itself sequential, so results never depend on the worker count.
    """
    seen: dict[int, tuple] = {}
    for alpha in config.alphas:
        for trial in range(config.trials):
            instance_seed, run_seeds = _trial_seeds(config, alpha, trial)
            named = [(instance_seed, (alpha, trial, "instance"))]
            named += [(seed, (alpha, trial, algo)) for algo, seed in run_seeds.items()]
            for seed, key in named:
                if seed in seen:
                    raise RuntimeError(f"seed collision detected: {key} vs {seen[seed]}")
                seen[seed] = key

    # Tasks are issued and collected in grid order, so the record order is
    # independent of the worker count.
    tasks = [(config, alpha, trial) for alpha in config.alphas for trial in range(config.trials)]
    records: list[RunRecord] = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for done, chunk in enumerate(pool.map(_run_trial, tasks), start=1):
                records.extend(chunk)
                if progress is not None:
                    progress(done, len(tasks))
    else:
        for done, task in enumerate(tasks, start=1):
            records.extend(_run_trial(task))
            if progress is not None:
                progress(done, len(tasks))
    return records


def aggregate(records: list[RunRecord]) -> list[dict]:
    """Success rate and median evals-to-success per (problem, alpha, algorithm)."""
    cells: dict[tuple, list[RunRecord]] = {}
    for record in records:
        cells.setdefault((record.problem, record.alpha, record.algorithm), []).append(record)

    algo_order = {a: i for i, a in enumerate(ALGORITHMS)}
    rows = []
    for (problem, alpha, algorithm) in sorted(
        cells, key=lambda k: (k[0], k[1], algo_order.get(k[2], len(algo_order)), k[2])
    ):
        cell = cells[(problem, alpha, algorithm)]
        successes = [r.evals_used for r in cell if r.success]
        rows.append(
            {
                "problem": problem,
                "alpha": alpha,
                "algorithm": algorithm,
                "trials": len(cell),
                "success_rate": len(successes) / len(cell),
                "median_evals": float(np.median(successes)) if successes else None,
            }
        )
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as err:
        raise RuntimeError(f"failed to write {path}: {err}") from err


def write_table(table: list[dict], path) -> None:
    """Write aggregated rows with the documented table.csv schema."""
    _write_csv(
        Path(path),
        TABLE_COLUMNS,
        (
            [
                row["problem"],
                _cell(float(row["alpha"])),
                row["algorithm"],
                row["trials"],
                _cell(float(row["success_rate"])),
                _cell(row["median_evals"]),
            ]
            for row in table
        ),
    )


def write_results(records: list[RunRecord], table: list[dict], out_dir) -> None:
    """Write runs.csv, table.csv and optional traj/*.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "runs.csv",
        RUNS_COLUMNS,
        (
            [
                r.run_id,
                r.problem,
                r.n,
                r.m,
                _cell(float(r.alpha)),
                r.algorithm,
                r.t_freeze,
                r.instance_seed,
                r.run_seed,
                r.evals_used,
                _cell(float(r.best_value)),
                _cell(bool(r.success)),
                _cell(float(r.wall_ms)),
            ]
            for r in records
        ),
    )
    write_table(table, out / "table.csv")
    with_traj = [r for r in records if r.trajectory is not None]
    if with_traj:
        traj_dir = out / "traj"
        traj_dir.mkdir(exist_ok=True)
        for record in with_traj:
            evals, best = record.trajectory
            _write_csv(
                traj_dir / f"{record.run_id}.csv",
                ("evals", "best_f"),
                ([int(e), _cell(float(b))] for e, b in zip(evals, best)),
            )


def write_config_echo(config: RunConfig, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = {
        "problem": config.problem,
        "n": config.n,
        "m": config.m,
        "alpha": list(config.alphas),
        "algo": list(config.algorithms),
        "trials": config.trials,
        "budget": config.budget,
        "target": config.target,
        "t_freeze": str(config.t_freeze),
        "seed": config.seed,
        "traj": config.traj,
        "workers": config.workers,
        "out": str(config.out),
    }
    try:
        (out / "config.json").write_text(json.dumps(data, indent=2) + "\n")
    except OSError as err:
        raise RuntimeError(f"failed to write {out / 'config.json'}: {err}") from err


_CONFIG_KEYS = {
    "problem",
    "n",
    "m",
    "alpha",
    "algo",
    "trials",
    "budget",
    "target",
    "t_freeze",
    "seed",
    "traj",
    "workers",
    "out",
}


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus flag overrides.

    Override values of None mean "not given on the command line". Unknown
    keys in the file are rejected; missing required keys are reported by
    name.
    """
    merged: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as err:
            raise RuntimeError(f"failed to read config {path}: {err}") from err
        unknown = sorted(set(data) - _CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(data)
    for key, value in (overrides or {}).items():
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key: {key}")
        if value is not None:
            merged[key] = value

    missing = [key for key in ("problem", "n", "m") if key not in merged]
    if missing:
        raise ValueError(f"missing required config keys: {', '.join(missing)}")

    alphas = merged.get("alpha", [1.0])
    if np.isscalar(alphas):
        alphas = [alphas]
    algorithms = merged.get("algo", list(ALGORITHMS))
    if isinstance(algorithms, str):
        algorithms = [algorithms]
    t_freeze = merged.get("t_freeze", "adaptive:5")
    if isinstance(t_freeze, str):
        t_freeze = WarmStartConfig.parse(t_freeze)

    return RunConfig(
        problem=str(merged["problem"]),
        n=int(merged["n"]),
        m=int(merged["m"]),
        alphas=tuple(float(a) for a in alphas),
        algorithms=tuple(algorithms),
        trials=int(merged.get("trials", 100)),
        budget=int(merged.get("budget", 10**6)),
        target=float(merged.get("target", 1e-10)),
        t_freeze=t_freeze,
        seed=int(merged.get("seed", 1)),
        traj=bool(merged.get("traj", False)),
        workers=int(merged.get("workers", 1)),
        out=str(merged.get("out", "results")),
    )


def read_runs_csv(path) -> list[RunRecord]:
    """Load runs.csv back into records (without trajectories)."""
    records = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            records.append(
                RunRecord(
                    run_id=row["run_id"],
                    problem=row["problem"],
                    n=int(row["n"]),
                    m=int(row["m"]),
                    alpha=float(row["alpha"]),
                    algorithm=row["algorithm"],
                    t_freeze=int(row["t_freeze"]),
                    instance_seed=int(row["instance_seed"]),
                    run_seed=int(row["run_seed"]),
                    evals_used=int(row["evals_used"]),
                    best_value=float(row["best_value"]),
                    success=row["success"] == "1",
                    wall_ms=float(row["wall_ms"]),
                )
            )
    return records
