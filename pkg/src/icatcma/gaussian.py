"""Gaussian sampling model for the continuous variables.

Full-covariance CMA-ES machinery: rank-weighted mean recombination,
cumulative step-size adaptation through the evolution path p_sigma,
rank-one plus rank-mu covariance updates through p_c, and an eigenvalue
floor that keeps the sampled covariance numerically decomposable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RunAborted

# Lower bound enforced on the smallest eigenvalue of sigma^2 C.
LAMBDA_MIN = 1e-30


@dataclass(frozen=True)
class Hyperparameters:
    """Population size, recombination weights and learning rates."""

    lam: int
    weights: np.ndarray  # length lam, nonnegative, nonincreasing, sums to 1
    mu_eff: float
    c_m: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float

    def __post_init__(self) -> None:
        if self.lam < 2:
            raise ValueError("population size must be at least 2")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.lam,):
            raise ValueError("weights must have one entry per population member")
        if np.any(w < 0.0) or np.any(np.diff(w) > 0.0):
            raise ValueError("weights must be nonnegative and nonincreasing in rank")
        if not math.isclose(float(w.sum()), 1.0, rel_tol=0.0, abs_tol=1e-12):
            raise ValueError("weights must sum to 1")
        for name in ("c_m", "c_sigma", "c_c", "c_1", "c_mu"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.d_sigma < 1.0:
            raise ValueError("d_sigma must be at least 1")

    @property
    def mu(self) -> int:
        """Number of positive weights (parents used in recombination)."""
        return int(np.count_nonzero(self.weights))


def default_hyperparameters(n: int, population_size: int | None = None) -> Hyperparameters:
    """Standard CMA-ES defaults for dimension n with truncation weights."""
    if n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    lam = population_size if population_size is not None else 4 + int(3 * math.log(n))
    if lam < 2:
        raise ValueError("population size must be at least 2")
    mu = lam // 2
    raw = np.array([math.log((lam + 1) / 2) - math.log(k) for k in range(1, mu + 1)])
    weights = np.zeros(lam)
    weights[:mu] = raw / raw.sum()
    mu_eff = 1.0 / float(np.sum(weights[:mu] ** 2))

    c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n)
    c_1 = 2.0 / ((n + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) ** 2 + mu_eff))
    return Hyperparameters(
        lam=lam,
        weights=weights,
        mu_eff=mu_eff,
        c_m=1.0,
        c_sigma=c_sigma,
        d_sigma=d_sigma,
        c_c=c_c,
        c_1=c_1,
        c_mu=c_mu,
    )


def expected_chi_norm(n: int) -> float:
    """Series approximation of E||N(0, I_n)||."""
    if n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    return math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))


class GaussianModel:
    """Mean, step-size and covariance shape with their evolution paths.

    The covariance of the sampling distribution is sigma^2 C. The
    eigendecomposition of C is refreshed after every covariance update and
    reused for sampling and for the whitening transform C^(-1/2).
    """

    def __init__(self, mean: np.ndarray, sigma: float, cov: np.ndarray | None = None):
        self.mu = np.asarray(mean, dtype=float).copy()
        if self.mu.ndim != 1 or self.mu.size < 1:
            raise ValueError("mean must be a non-empty vector")
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        n = self.mu.size
        self.C = np.eye(n) if cov is None else np.asarray(cov, dtype=float).copy()
        if self.C.shape != (n, n):
            raise ValueError(f"covariance must be {n}x{n}")
        self.p_sigma = np.zeros(n)
        self.p_c = np.zeros(n)
        self.t = 0
        self._chi_n = expected_chi_norm(n)
        self._decompose()

    @property
    def n(self) -> int:
        return self.mu.size

    def _decompose(self) -> None:
        # Symmetrize before eigh; keep B, sqrt eigenvalues, and the
        # transforms needed for sampling (B diag(d)) and whitening.
        self.C = (self.C + self.C.T) / 2.0
        if not np.all(np.isfinite(self.C)):
            raise RunAborted("covariance-not-finite", "covariance matrix contains non-finite entries")
        eigvals, basis = np.linalg.eigh(self.C)
        if eigvals[0] <= 0.0:
            raise RunAborted(
                "covariance-not-positive-definite",
                f"covariance lost positive-definiteness (min eigenvalue {eigvals[0]:.3e})",
            )
        self._eigvals = eigvals
        root = np.sqrt(eigvals)
        self._transform = basis * root  # maps z ~ N(0, I) to N(0, C)
        self._inv_sqrt = (basis / root) @ basis.T  # C^(-1/2)

    def sample_population(self, lam: int, rng: np.random.Generator) -> np.ndarray:
        """Draw lam independent vectors from N(mu, sigma^2 C) as rows."""
        z = rng.standard_normal((lam, self.n))
        return self.mu + self.sigma * (z @ self._transform.T)

    def update_mean(self, ranked_x: np.ndarray, hyper: Hyperparameters) -> np.ndarray:
        """Recombined mean from candidates given in rank order (best first)."""
        return self.mu + hyper.c_m * (hyper.weights @ (ranked_x - self.mu))

    def update_evolution_paths(
        self, mu_new: np.ndarray, hyper: Hyperparameters
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """New (p_sigma, p_c, h_sigma) from the mean shift of this iteration.

        Uses the pre-update mean, step-size and covariance. h_sigma stalls
        the p_c input when p_sigma is already implausibly long, so that the
        rank-one update cannot explode after a step-size collapse.
        """
        shift = (mu_new - self.mu) / (hyper.c_m * self.sigma * math.sqrt(float(np.sum(hyper.weights**2))))
        c_s = hyper.c_sigma
        p_sigma = (1.0 - c_s) * self.p_sigma + math.sqrt(c_s * (2.0 - c_s)) * (self._inv_sqrt @ shift)
        correction = math.sqrt(1.0 - (1.0 - c_s) ** (2 * (self.t + 1)))
        threshold = correction * (1.4 + 2.0 / (self.n + 1.0)) * self._chi_n
        h_sigma = 1.0 if float(np.linalg.norm(p_sigma)) < threshold else 0.0
        c_c = hyper.c_c
        p_c = (1.0 - c_c) * self.p_c + h_sigma * math.sqrt(c_c * (2.0 - c_c)) * shift
        return p_sigma, p_c, h_sigma

    def update_step_size(self, p_sigma_new: np.ndarray, hyper: Hyperparameters) -> float:
        """Multiplicative step-size update from the length of p_sigma."""
        ratio = float(np.linalg.norm(p_sigma_new)) / self._chi_n
        return self.sigma * math.exp((hyper.c_sigma / hyper.d_sigma) * (ratio - 1.0))

    def update_covariance(
        self,
        ranked_x: np.ndarray,
        p_c_new: np.ndarray,
        h_sigma: float,
        hyper: Hyperparameters,
    ) -> np.ndarray:
        """Rank-mu plus rank-one covariance update (pre-update mu, sigma)."""
        mu_count = hyper.mu
        y = (ranked_x[:mu_count] - self.mu) / self.sigma
        rank_mu = np.einsum("k,ki,kj->ij", hyper.weights[:mu_count], y, y)
        decay = 1.0 - hyper.c_mu - hyper.c_1 * (1.0 - (1.0 - h_sigma) * hyper.c_c * (2.0 - hyper.c_c))
        c_new = decay * self.C + hyper.c_mu * rank_mu + hyper.c_1 * np.outer(p_c_new, p_c_new)
        return (c_new + c_new.T) / 2.0

    def enforce_sigma_floor(self) -> None:
        """Raise sigma so that the smallest eigenvalue of sigma^2 C stays
        above LAMBDA_MIN. The floor is bumped by ulps where rounding of the
        square root would leave sigma^2 * min_eig marginally below the
        bound, keeping the invariant exactly assertable."""
        min_eig = float(self._eigvals[0])
        floor = math.sqrt(LAMBDA_MIN / min_eig)
        while floor * floor * min_eig < LAMBDA_MIN:
            floor = math.nextafter(floor, math.inf)
        self.sigma = max(self.sigma, floor)

    def step(self, ranked_x: np.ndarray, hyper: Hyperparameters) -> None:
        """One full iteration: mean, paths, step-size, covariance, floor."""
        mu_new = self.update_mean(ranked_x, hyper)
        p_sigma_new, p_c_new, h_sigma = self.update_evolution_paths(mu_new, hyper)
        sigma_new = self.update_step_size(p_sigma_new, hyper)
        c_new = self.update_covariance(ranked_x, p_c_new, h_sigma, hyper)
        self.mu = mu_new
        self.p_sigma = p_sigma_new
        self.p_c = p_c_new
        self.sigma = sigma_new
        self.C = c_new
        self._decompose()
        self.enforce_sigma_floor()
        self.t += 1
