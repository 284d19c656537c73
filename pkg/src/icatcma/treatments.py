"""Interaction treatments layered on top of the joint optimizer.

Warm-starting freezes the Bernoulli model for a number of iterations while
the Gaussian model optimizes the continuous variables against one shared
binary draw per iteration. Hyper-representation replaces the continuous
variable x by the parameters w of an affine map c -> x, so that a single w
can be optimal across all binary vectors. Enabling both yields ICatCMA;
enabling neither is plain CatCMA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catcma import Candidate, CatCMA, Termination
from .problems import ProblemInstance


def pack_affine(v: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Flatten (V, b) into one parameter vector, V row-major then b."""
    v = np.asarray(v, dtype=float)
    b = np.asarray(b, dtype=float)
    if v.ndim != 2 or b.ndim != 1 or v.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes V {v.shape}, b {b.shape}")
    return np.concatenate([v.reshape(-1), b])


def unpack_affine(w: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of `pack_affine` for an n x m map."""
    w = np.asarray(w, dtype=float)
    if w.shape != (n * (m + 1),):
        raise ValueError(f"expected parameter vector of length {n * (m + 1)}, got {w.shape}")
    return w[: n * m].reshape(n, m).copy(), w[n * m :].copy()


def apply_affine(w: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Evaluate the affine map V c + b encoded in the packed vector w."""
    c = np.asarray(c, dtype=float)
    m = c.shape[0]
    w = np.asarray(w, dtype=float)
    if w.size % (m + 1) != 0:
        raise ValueError(f"parameter length {w.size} is not a multiple of m+1 = {m + 1}")
    n = w.size // (m + 1)
    return w[: n * m].reshape(n, m) @ c + w[n * m :]


class WrappedObjective:
    """Objective over (c, w) obtained by routing x through the affine map.

    Each call maps w to x = V c + b and evaluates the inner objective
    exactly once, so evaluation accounting is unchanged by the wrapping.
    """

    def __init__(self, f, n: int, m: int):
        self.inner = f
        self.n = n
        self.m = m

    def __call__(self, c: np.ndarray, w: np.ndarray) -> float:
        return self.inner(c, apply_affine(w, c))

    def batch(self, cs: np.ndarray, ws: np.ndarray) -> np.ndarray:
        n, m = self.n, self.m
        v = ws[:, : n * m].reshape(-1, n, m)
        xs = np.einsum("kij,kj->ki", v, cs) + ws[:, n * m :]
        inner_batch = getattr(self.inner, "batch", None)
        if inner_batch is not None:
            return inner_batch(cs, xs)
        return np.array([self.inner(c, x) for c, x in zip(cs, xs)])


def wrap_objective(f, n: int, m: int) -> WrappedObjective:
    """Turn an objective over (c, x) into one over (c, w), w packed affine."""
    return WrappedObjective(f, n, m)


@dataclass(frozen=True)
class WarmStartConfig:
    """Policy for the number of frozen iterations.

    Adaptive policy scales with problem size as floor(A * 100 * l / lambda)
    where l is the continuous dimension actually optimized; the fixed
    policy pins an iteration count directly.
    """

    mode: str  # "adaptive" or "fixed"
    value: float

    def __post_init__(self) -> None:
        if self.mode not in ("adaptive", "fixed"):
            raise ValueError(f"unknown warm-start mode {self.mode!r}")
        if self.value < 0:
            raise ValueError("warm-start parameter must be nonnegative")

    @classmethod
    def adaptive(cls, a: float = 5.0) -> WarmStartConfig:
        return cls(mode="adaptive", value=float(a))

    @classmethod
    def fixed(cls, t: int) -> WarmStartConfig:
        return cls(mode="fixed", value=float(t))

    @classmethod
    def parse(cls, text: str) -> WarmStartConfig:
        """Parse the CLI form "adaptive:A" or "fixed:T"."""
        mode, sep, value = text.partition(":")
        if not sep:
            raise ValueError(f"expected MODE:VALUE, got {text!r}")
        return cls(mode=mode, value=float(value))

    def __str__(self) -> str:
        value = self.value
        return f"{self.mode}:{int(value) if value == int(value) else value}"


def resolve_t_freeze(policy: WarmStartConfig, l: int, lam: int) -> int:
    """Number of frozen iterations for a continuous dimension l."""
    if l < 1 or lam < 1:
        raise ValueError("dimensions must be positive")
    if policy.mode == "fixed":
        return int(policy.value)
    return math.floor(policy.value * 100.0 * l / lam)


def warm_start_ask(optimizer: CatCMA) -> list[Candidate]:
    """Population for one frozen iteration: one shared binary vector."""
    return optimizer.ask(shared_binary=True)


def warm_start_tell(optimizer: CatCMA, candidates: list[Candidate]) -> None:
    """Gaussian-only update; the Bernoulli model stays bitwise untouched."""
    optimizer.tell(candidates, freeze_binary=True)


def analytic_grad_fII_affine(
    instance: ProblemInstance, c: np.ndarray, v: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form descent directions of the wrapped f2 objective.

    Test oracle, not used by the optimizer. The b component is independent
    of the bits; the V component contracts V toward alpha V* along cc^T.
    Each identity is exact when the other parameter block sits at its
    optimum (b = b* for dV, V = alpha V* for db).
    """
    if instance.kind != "f2":
        raise ValueError("analytic gradients are defined for the affine f2 problem only")
    c = np.asarray(c, dtype=float)
    db = 2.0 * (np.asarray(b, dtype=float) - instance.b_star)
    dv = 2.0 * (np.asarray(v, dtype=float) - instance.alpha * instance.v_star) @ np.outer(c, c)
    return dv, db


@dataclass
class RunOutcome:
    """Result of driving one optimizer until termination."""

    evals_used: int
    best_value: float
    success: bool
    reason: str
    trajectory: tuple[np.ndarray, np.ndarray] | None = None


class CatCMAVariant:
    """Variant driver: optional warm-start phase, optional objective wrapping.

    Delegates ask/tell to the underlying optimizer, switching to the
    shared-binary frozen updates while the iteration clock is below
    t_freeze. With t_freeze = 0 and an unwrapped objective this is a pure
    pass-through around plain CatCMA.
    """

    def __init__(self, optimizer: CatCMA, objective, t_freeze: int):
        self.optimizer = optimizer
        self.objective = objective
        self.t_freeze = t_freeze

    @property
    def in_warm_start(self) -> bool:
        return self.optimizer.t < self.t_freeze

    @property
    def evals_used(self) -> int:
        return self.optimizer.evals_used

    @property
    def best_value(self) -> float:
        return self.optimizer.best_value

    def ask(self) -> list[Candidate]:
        if self.in_warm_start:
            return warm_start_ask(self.optimizer)
        return self.optimizer.ask()

    def tell(self, candidates: list[Candidate]) -> None:
        if self.in_warm_start:
            warm_start_tell(self.optimizer, candidates)
        else:
            self.optimizer.tell(candidates)

    def should_terminate(self, budget: int, target: float) -> Termination:
        return self.optimizer.should_terminate(budget, target)

    def evaluate_population(self, candidates: list[Candidate]) -> None:
        """Fill in candidate values, batched when the objective allows."""
        batch = getattr(self.objective, "batch", None)
        if batch is not None:
            cs = np.stack([cand.c for cand in candidates])
            vs = np.stack([cand.v for cand in candidates])
            values = batch(cs, vs)
            for cand, value in zip(candidates, values):
                cand.value = float(value)
        else:
            for cand in candidates:
                cand.value = float(self.objective(cand.c, cand.v))

    def run(self, budget: int, target: float, record_trajectory: bool = False) -> RunOutcome:
        """Ask/tell until the target is hit or the budget is exhausted."""
        traj_evals: list[int] = []
        traj_best: list[float] = []
        while True:
            candidates = self.ask()
            self.evaluate_population(candidates)
            self.tell(candidates)
            if record_trajectory:
                traj_evals.append(self.evals_used)
                traj_best.append(self.best_value)
            termination = self.should_terminate(budget, target)
            if termination.stop:
                trajectory = None
                if record_trajectory:
                    trajectory = (np.asarray(traj_evals, dtype=np.int64), np.asarray(traj_best))
                return RunOutcome(
                    evals_used=self.evals_used,
                    best_value=self.best_value,
                    success=termination.success,
                    reason=termination.reason or "",
                    trajectory=trajectory,
                )


def make_icatcma(
    f,
    n: int,
    m: int,
    use_ws: bool = False,
    use_hr: bool = False,
    ws_config: WarmStartConfig | None = None,
    rng: int | np.random.Generator | None = None,
) -> CatCMAVariant:
    """Configure one of the four optimizer variants for an objective f(c, x).

    With hyper-representation the optimizer works on the packed affine
    parameters (dimension l = n(m+1)) and the objective is wrapped;
    otherwise l = n. The Gaussian model starts at mean 0 with step-size
    1/(l+m), so the initial distribution over effective x matches across
    variants. Warm-starting freezes the binary model for the first
    t_freeze iterations.
    """
    if n < 1 or m < 1:
        raise ValueError("dimensions must be positive")
    l = n * (m + 1) if use_hr else n
    objective = wrap_objective(f, n, m) if use_hr else f
    optimizer = CatCMA(n_binary=m, mean=np.zeros(l), sigma=1.0 / (l + m), seed=rng)
    t_freeze = 0
    if use_ws:
        policy = ws_config if ws_config is not None else WarmStartConfig.adaptive()
        t_freeze = resolve_t_freeze(policy, l, optimizer.population_size)
    return CatCMAVariant(optimizer=optimizer, objective=objective, t_freeze=t_freeze)
