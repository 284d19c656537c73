"""Joint ask/tell optimizer over the Bernoulli and Gaussian models.

Each candidate pairs a binary vector with a continuous vector. One tell
ranks the population by objective value, runs the Gaussian update block,
then the Bernoulli update block, and refreshes the incumbent. The binary
block can be frozen, which is how the warm-starting treatment runs the
continuous part alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bernoulli import BernoulliModel
from .errors import RunAborted
from .gaussian import GaussianModel, default_hyperparameters


@dataclass
class Candidate:
    """One sampled (binary, continuous) pair with its evaluation result."""

    c: np.ndarray
    v: np.ndarray
    value: float | None = None
    rank: int | None = None


@dataclass(frozen=True)
class Termination:
    """Outcome of a termination check."""

    stop: bool
    reason: str | None = None  # "target" or "budget"

    @property
    def success(self) -> bool:
        return self.reason == "target"


def rank(values) -> np.ndarray:
    """1-based ascending ranks (minimization), ties broken by index."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise RunAborted("non-finite-objective", "objective values contain NaN or Inf")
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=int)
    ranks[order] = np.arange(1, v.size + 1)
    return ranks


class CatCMA:
    """Mixed binary-continuous optimizer with an ask-and-tell interface.

    Args:
        n_binary: number of binary variables m.
        mean: initial mean vector of the Gaussian model (sets the
            continuous dimension).
        sigma: initial step-size.
        cov: initial covariance shape matrix (identity when omitted).
        q: initial bit probabilities (0.5 everywhere when omitted).
        population_size: overrides the default 4 + floor(3 ln n).
        seed: int seed or a ready `numpy.random.Generator`.
    """

    def __init__(
        self,
        n_binary: int,
        mean: np.ndarray,
        sigma: float,
        cov: np.ndarray | None = None,
        q: np.ndarray | None = None,
        population_size: int | None = None,
        seed: int | np.random.Generator | None = None,
    ):
        if n_binary < 1:
            raise ValueError("n_binary must be a positive integer")
        self.gaussian = GaussianModel(mean, sigma, cov)
        self.hyper = default_hyperparameters(self.gaussian.n, population_size)
        self.bernoulli = (
            BernoulliModel.initial(n_binary)
            if q is None
            else BernoulliModel.initial(n_binary, q0=np.asarray(q, dtype=float))
        )
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.evals_used = 0
        self.best_value = float("inf")
        self.best_candidate: Candidate | None = None

    @property
    def m(self) -> int:
        return self.bernoulli.m

    @property
    def n(self) -> int:
        return self.gaussian.n

    @property
    def population_size(self) -> int:
        return self.hyper.lam

    @property
    def t(self) -> int:
        """Iteration counter; a single clock shared by both models."""
        return self.gaussian.t

    def ask(self, shared_binary: bool = False) -> list[Candidate]:
        """Sample one population of candidate pairs.

        With `shared_binary` a single binary vector is drawn and reused by
        every candidate of the iteration (warm-starting), which makes the
        ranking of the continuous vectors deterministic given that vector.
        """
        lam = self.hyper.lam
        if shared_binary:
            shared = self.bernoulli.sample(self.rng)
            binaries = np.broadcast_to(shared, (lam, self.m))
        else:
            binaries = self.bernoulli.sample(self.rng, size=lam)
        xs = self.gaussian.sample_population(lam, self.rng)
        return [Candidate(c=binaries[k].copy(), v=xs[k]) for k in range(lam)]

    def tell(self, candidates: list[Candidate], freeze_binary: bool = False) -> None:
        """Consume one evaluated population and update the distribution.

        With `freeze_binary` only the Gaussian block runs; q and the ASNG
        state are left untouched while the iteration clock still advances.
        """
        if len(candidates) != self.hyper.lam:
            raise ValueError(f"expected {self.hyper.lam} candidates, got {len(candidates)}")
        if any(cand.value is None for cand in candidates):
            raise ValueError("all candidates must carry an objective value")
        values = np.array([cand.value for cand in candidates], dtype=float)
        ranks = rank(values)
        for cand, r in zip(candidates, ranks):
            cand.rank = int(r)
        order = np.argsort(ranks)

        ranked_x = np.stack([candidates[k].v for k in order])
        self.gaussian.step(ranked_x, self.hyper)
        if not freeze_binary:
            ranked_c = np.stack([candidates[k].c for k in order])
            self.bernoulli.step(ranked_c, self.hyper.weights)

        self.evals_used += len(candidates)
        best = candidates[order[0]]
        if best.value < self.best_value:
            self.best_value = float(best.value)
            self.best_candidate = Candidate(c=best.c.copy(), v=best.v.copy(), value=best.value, rank=1)

    def should_terminate(self, budget: int, target: float) -> Termination:
        """Stop on the first evaluated value below target, or on budget."""
        if self.best_value < target:
            return Termination(stop=True, reason="target")
        if self.evals_used >= budget:
            return Termination(stop=True, reason="budget")
        return Termination(stop=False)
