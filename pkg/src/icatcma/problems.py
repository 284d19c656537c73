"""Interaction test problems for mixed binary-continuous optimization.

Four problem kinds over a binary vector c and a continuous vector x:

* ``f1``: ``||x . c - b*||^2`` where ``.`` masks continuous coordinates by
  the bits, so which coordinates matter depends on c (type-I interaction).
* ``f2``: ``sum_i(1 - c_i) + ||x - phi*(c)||^2`` where the minimizing x
  shifts with c through ``phi*(c) = alpha V* c + b*`` (type-II interaction).
* ``f2tanh``: f2 with ``phi*(c) = tanh(alpha V* c + b*)``, a target map the
  affine hyper-representation cannot express exactly.
* ``f3``: ``||x . c - phi*(c)||^2`` combining both interaction types; with
  alpha = 0 it coincides with f1.

Instances freeze random data V* (unit Frobenius norm) and b* (unit
Euclidean norm) drawn from a dedicated instance RNG, so one instance can
be shared across algorithm variants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

KINDS = ("f1", "f2", "f2tanh", "f3")

# f1 uniqueness requires every effective target component to be nonzero;
# violations have probability zero but are resampled defensively.
_MIN_COMPONENT = 1e-12


@dataclass(frozen=True)
class ProblemInstance:
    kind: str
    n: int
    m: int
    alpha: float
    v_star: np.ndarray  # (n, m), Frobenius norm 1
    b_star: np.ndarray  # (n,), Euclidean norm 1
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("dimensions must be positive")
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if self.kind in ("f1", "f3") and self.n != self.m:
            raise ValueError(f"{self.kind} requires n == m, got n={self.n}, m={self.m}")
        if self.v_star.shape != (self.n, self.m) or self.b_star.shape != (self.n,):
            raise ValueError("V*/b* shapes do not match the declared dimensions")


def generate_instance(kind: str, n: int, m: int, alpha: float, seed: int) -> ProblemInstance:
    """Draw normalized instance data deterministically from the seed."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, m))
    v /= np.linalg.norm(v)
    b = rng.standard_normal(n)
    b /= np.linalg.norm(b)
    while np.any(np.abs(b) <= _MIN_COMPONENT):
        b = rng.standard_normal(n)
        b /= np.linalg.norm(b)
    return ProblemInstance(kind=kind, n=n, m=m, alpha=float(alpha), v_star=v, b_star=b, seed=seed)


def f_c(c: np.ndarray) -> float:
    """Binary cost counting the zero bits."""
    return float(np.sum(1.0 - np.asarray(c, dtype=float)))


def phi_star(instance: ProblemInstance, c: np.ndarray) -> np.ndarray:
    """Optimal continuous vector for the given bits (f2/f2tanh/f3 only)."""
    if instance.kind == "f1":
        raise ValueError("f1 has no phi*; its optimal x is b* independently of c")
    affine = instance.alpha * (instance.v_star @ np.asarray(c, dtype=float)) + instance.b_star
    return np.tanh(affine) if instance.kind == "f2tanh" else affine


def evaluate(instance: ProblemInstance, c: np.ndarray, x: np.ndarray) -> float:
    """Objective value at one (binary, continuous) pair."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if c.shape != (instance.m,) or x.shape != (instance.n,):
        raise ValueError("candidate dimensions do not match the instance")
    if instance.kind == "f1":
        r = x * c - instance.b_star
        return float(r @ r)
    if instance.kind == "f3":
        r = x * c - phi_star(instance, c)
        return float(r @ r)
    r = x - phi_star(instance, c)
    return f_c(c) + float(r @ r)


def evaluate_batch(instance: ProblemInstance, cs: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Vectorized `evaluate` over populations (rows are candidates)."""
    cs = np.asarray(cs, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if instance.kind == "f1":
        r = xs * cs - instance.b_star
        return np.einsum("ki,ki->k", r, r)
    targets = instance.alpha * (cs @ instance.v_star.T) + instance.b_star
    if instance.kind == "f2tanh":
        targets = np.tanh(targets)
    if instance.kind == "f3":
        r = xs * cs - targets
        return np.einsum("ki,ki->k", r, r)
    r = xs - targets
    return (instance.m - cs.sum(axis=1)) + np.einsum("ki,ki->k", r, r)


class Objective:
    """Instance-bound objective callable with a batch fast path."""

    def __init__(self, instance: ProblemInstance):
        self.instance = instance

    def __call__(self, c: np.ndarray, x: np.ndarray) -> float:
        return evaluate(self.instance, c, x)

    def batch(self, cs: np.ndarray, xs: np.ndarray) -> np.ndarray:
        return evaluate_batch(self.instance, cs, xs)


def _enumerate_bits(m: int) -> np.ndarray:
    codes = np.arange(2**m, dtype=np.int64)
    return ((codes[:, None] >> np.arange(m)) & 1).astype(float)


def optimum(instance: ProblemInstance) -> tuple[np.ndarray, np.ndarray, float]:
    """Global optimum (c*, x*, f*) by enumeration over all binary vectors.

    For each c the inner minimum over x is analytic: the residual term
    vanishes on the unmasked coordinates, leaving only the contribution of
    masked coordinates (f1/f3) or the binary cost (f2/f2tanh).
    """
    if instance.m > 20:
        raise ValueError("optimum enumeration supports m <= 20 only")
    bits = _enumerate_bits(instance.m)
    if instance.kind == "f1":
        values = (1.0 - bits) @ (instance.b_star**2)
    elif instance.kind == "f3":
        targets = instance.alpha * (bits @ instance.v_star.T) + instance.b_star
        values = np.einsum("ki,ki->k", (1.0 - bits) * targets, (1.0 - bits) * targets)
    else:
        values = instance.m - bits.sum(axis=1)
    best = int(np.argmin(values))
    c_opt = bits[best]
    x_opt = instance.b_star.copy() if instance.kind == "f1" else phi_star(instance, c_opt)
    return c_opt, x_opt, float(values[best])


def optimal_bits_for_x(instance: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Closed-form best bits for f1 at a fixed x; ties resolve to 1."""
    if instance.kind != "f1":
        raise ValueError("closed-form optimal bits are defined for f1 only")
    return (np.abs(x - instance.b_star) <= np.abs(instance.b_star)).astype(float)


def to_record(instance: ProblemInstance) -> str:
    """Self-describing JSON record with full-precision instance data."""
    return json.dumps(
        {
            "kind": instance.kind,
            "n": instance.n,
            "m": instance.m,
            "alpha": instance.alpha,
            "seed": instance.seed,
            "v_star": instance.v_star.tolist(),
            "b_star": instance.b_star.tolist(),
        }
    )


def from_record(record: str) -> ProblemInstance:
    data = json.loads(record)
    return ProblemInstance(
        kind=data["kind"],
        n=int(data["n"]),
        m=int(data["m"]),
        alpha=float(data["alpha"]),
        v_star=np.asarray(data["v_star"], dtype=float),
        b_star=np.asarray(data["b_star"], dtype=float),
        seed=int(data["seed"]),
    )
