"""Bernoulli sampling model for the binary variables.

The model keeps a probability vector q (probability of each bit being 1)
that is updated by a ranking-weighted natural gradient. The trust-region
scalar delta adapts the learning rate from the accumulated gradient signal
(ASNG-style), and q is clipped into fixed margins so that no bit ever
becomes deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# With q fully at the margins, a sample still differs from the corner in at
# least one bit with probability xi.
XI_DEFAULT = 0.27

# Trust-region constant of the delta adaptation.
ALPHA_ASNG = 1.5

# The accumulation update is undefined at beta = delta / sqrt(m) >= 2
# (negative radicand); delta is clamped below that singularity. Sustained
# aligned gradients equilibrate near beta = 0.8, so the clamp only engages
# on transient spikes in degenerate corner states.
BETA_MAX = 1.9


def margin_bounds(m: int, xi: float = XI_DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper clamps for the probability vector of an m-bit model."""
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not 0.0 < xi < 1.0:
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    q_min = np.full(m, 1.0 - (1.0 - xi) ** (1.0 / m))
    return q_min, 1.0 - q_min


def log_pmf(q: np.ndarray, c: np.ndarray) -> float:
    """Log probability of the binary vector c under bitwise Bernoulli(q)."""
    q = np.asarray(q, dtype=float)
    c = np.asarray(c, dtype=float)
    if q.shape != c.shape:
        raise ValueError(f"shape mismatch: q {q.shape} vs c {c.shape}")
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise ValueError("q must lie strictly inside (0, 1)")
    return float(np.sum(c * np.log(q) + (1.0 - c) * np.log1p(-q)))


def fisher_diag(q: np.ndarray) -> np.ndarray:
    """Diagonal of the Fisher information matrix, 1 / (q_i (1 - q_i))."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise ValueError("q must lie strictly inside (0, 1)")
    return 1.0 / (q * (1.0 - q))


def fisher_norm(q: np.ndarray, g: np.ndarray) -> float:
    """Mahalanobis norm of g with respect to the Fisher matrix at q."""
    return math.sqrt(float(np.sum(g * g * fisher_diag(q))))


def natural_gradient(q: np.ndarray, binaries: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Ranking-weighted natural gradient estimate for the q update.

    `binaries` holds one binary vector per row in rank order (best first),
    so `weights[k]` is the weight of the rank-(k+1) candidate.
    """
    binaries = np.asarray(binaries, dtype=float)
    if binaries.ndim != 2 or binaries.shape[0] == 0:
        raise ValueError("population must be a non-empty (lambda, m) array")
    weights = np.asarray(weights, dtype=float)
    return weights @ (binaries - q)


@dataclass
class BernoulliModel:
    """Probability vector with margins plus the ASNG adaptation state."""

    q: np.ndarray
    q_min: np.ndarray
    q_max: np.ndarray
    delta: float = 1.0
    s: np.ndarray = field(default=None)  # type: ignore[assignment]
    gamma: float = 0.0

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float)
        if self.s is None:
            self.s = np.zeros_like(self.q)
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")
        if np.any(self.q < self.q_min) or np.any(self.q > self.q_max):
            raise ValueError("initial q violates the margin bounds")

    @classmethod
    def initial(cls, m: int, q0: np.ndarray | float = 0.5, xi: float = XI_DEFAULT) -> BernoulliModel:
        q_min, q_max = margin_bounds(m, xi)
        q = np.full(m, q0, dtype=float) if np.isscalar(q0) else np.asarray(q0, dtype=float)
        return cls(q=q, q_min=q_min, q_max=q_max)

    @property
    def m(self) -> int:
        return self.q.shape[0]

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw one binary vector, or a (size, m) batch, as 0/1 floats."""
        if size is None:
            return (rng.random(self.m) < self.q).astype(float)
        return (rng.random((size, self.m)) < self.q).astype(float)

    def learning_rate(self, g: np.ndarray) -> float:
        """Normalized learning rate delta / ||g||_F(q)."""
        norm = fisher_norm(self.q, g)
        if norm == 0.0:
            raise ValueError("natural gradient has zero Fisher norm; update must be skipped")
        return self.delta / norm

    def asng_update(self, g: np.ndarray) -> None:
        """Advance (s, gamma, delta) from the gradient of this iteration.

        Uses the pre-update q and the pre-update delta (through beta).
        """
        beta = self.delta / math.sqrt(self.m)
        fisher = fisher_diag(self.q)
        g_norm_sq = float(np.sum(g * g * fisher))
        self.s = (1.0 - beta) * self.s + math.sqrt(beta * (2.0 - beta)) * np.sqrt(fisher) * g
        self.gamma = (1.0 - beta) ** 2 * self.gamma + beta * (2.0 - beta) * g_norm_sq
        self.delta *= math.exp(beta * (float(self.s @ self.s) / ALPHA_ASNG - self.gamma))
        self.delta = min(self.delta, BETA_MAX * math.sqrt(self.m))

    def update_and_clip(self, eta: float, g: np.ndarray) -> None:
        """Additive q update followed by clipping into the margins."""
        if eta < 0.0:
            raise ValueError("eta must be nonnegative")
        self.q = np.clip(self.q + eta * g, self.q_min, self.q_max)

    def step(self, binaries: np.ndarray, weights: np.ndarray) -> None:
        """One full update from a rank-ordered population of binary vectors.

        Skips the whole update when the gradient estimate is exactly zero
        (degenerate population), which avoids a 0/0 in the learning rate.
        """
        g = natural_gradient(self.q, binaries, weights)
        norm = fisher_norm(self.q, g)
        if norm == 0.0:
            return
        eta = self.delta / norm
        q_new = self.q + eta * g
        self.asng_update(g)
        self.q = np.clip(q_new, self.q_min, self.q_max)
