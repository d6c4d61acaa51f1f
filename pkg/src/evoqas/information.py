"""Empirical Fisher information and the effective dimension.

The effective dimension of a model with ``d`` parameters at data scale ``n``
is estimated by Monte Carlo over ``theta`` drawn uniformly from the model's
parameter box::

    kappa = gamma * n / (2 pi log n)
    ed    = 2 log( mean_s sqrt(det(I + kappa * F_hat(theta_s))) ) / log(kappa)

where ``F_hat`` is the Fisher matrix rescaled so that its mean trace over
the theta samples equals ``d``.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .model import PROB_FLOOR, VanishingProbabilityError

MAX_RESAMPLE_ROUNDS = 10
# mean Fisher trace below this is parameter-shift round-off (scores ~1e-10 or
# smaller), not information; normalising it would inflate noise to full rank
TRACE_FLOOR = 1e-20


class DegenerateFisherError(ValueError):
    """Every Fisher sample has zero trace; the model carries no information."""


@dataclass(frozen=True, eq=False)
class FisherSample:
    theta: np.ndarray
    matrix: np.ndarray
    trace: float
    inputs: Optional[np.ndarray] = field(default=None, repr=False)
    labels: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EffectiveDimensionResult:
    gamma: float
    n: int
    kappa: float
    value: float
    num_theta_samples: int
    k: int
    seed: int
    d: int = 0

    @property
    def normalized(self) -> float:
        return self.value / self.d if self.d else 0.0


def kappa(gamma: float, n: int) -> float:
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if n <= 1:
        raise ValueError(f"n must exceed 1, got {n}")
    return gamma * n / (2 * math.pi * math.log(n))


def _draw_data(model, theta, k, rng):
    X = rng.standard_normal((k, model.num_inputs))
    probs = model.probabilities(X, theta)
    y = (rng.random(k) < probs[:, 1]).astype(np.intp)
    for _ in range(MAX_RESAMPLE_ROUNDS):
        bad = probs[np.arange(k), y] <= PROB_FLOOR
        if not bad.any():
            return X, y
        m = int(bad.sum())
        X[bad] = rng.standard_normal((m, model.num_inputs))
        probs[bad] = model.probabilities(X[bad], theta)
        y[bad] = (rng.random(m) < probs[bad, 1]).astype(np.intp)
    raise VanishingProbabilityError(
        f"could not draw usable samples after {MAX_RESAMPLE_ROUNDS} resampling rounds"
    )


def empirical_fisher(model, theta, k: int, rng: np.random.Generator) -> FisherSample:
    """Average of ``k`` score outer products with ``x ~ N(0, I)`` and ``y ~ p(.|x; theta)``."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    X, y = _draw_data(model, theta, k, rng)
    S = model.scores(X, y, theta)
    F = S.T @ S / k
    F = 0.5 * (F + F.T)
    return FisherSample(theta, F, float(np.trace(F)), X, y)


def sample_fishers(model, num_theta_samples: int, k: int, seed: int,
                   fisher_fn: Callable = empirical_fisher,
                   threads: int = 1) -> List[FisherSample]:
    """Fisher samples at ``theta_s ~ U(param_bounds)``, ``s = 0..num_theta_samples-1``.

    Sample ``s`` draws everything from a stream seeded by ``(seed, s)``, so
    the result does not depend on ``threads``.
    """
    if num_theta_samples < 1:
        raise ValueError("num_theta_samples must be positive")
    low, high = model.param_bounds

    def one(s):
        rng = np.random.default_rng([seed, s])
        theta = rng.uniform(low, high, model.num_params)
        return fisher_fn(model, theta, k, rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(num_theta_samples)))
    return [one(s) for s in range(num_theta_samples)]


def normalize_fisher(samples: Sequence[FisherSample], d: int) -> List[np.ndarray]:
    """Rescale every matrix by ``d * S / sum(traces)`` so the mean trace is ``d``."""
    if not samples:
        raise ValueError("need at least one Fisher sample")
    total = math.fsum(s.trace for s in samples)
    if total <= TRACE_FLOOR * len(samples):
        raise DegenerateFisherError(f"mean Fisher trace {total / len(samples):.3g} is numerically zero")
    factor = d * len(samples) / total
    return [s.matrix * factor for s in samples]


def eigenspectrum(matrix, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in ascending order."""
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.size and np.max(np.abs(M - M.T)) > tol:
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(M)


def _half_logdets(normalized: Sequence[np.ndarray], kap: float) -> np.ndarray:
    out = np.empty(len(normalized))
    for i, F in enumerate(normalized):
        lam = np.clip(eigenspectrum(F), 0.0, None)
        out[i] = 0.5 * np.sum(np.log1p(kap * lam))
    return out


def effective_dimension_from_fishers(normalized: Sequence[np.ndarray], gamma: float, n: int) -> float:
    """Effective dimension from already normalised Fisher matrices."""
    kap = kappa(gamma, n)
    if kap <= 1.0:
        raise ValueError(f"kappa = {kap:.4g} <= 1 for gamma={gamma}, n={n}")
    h = _half_logdets(normalized, kap)
    top = h.max()
    log_mean = top + math.log(np.mean(np.exp(h - top)))
    return max(0.0, 2.0 * log_mean / math.log(kap))


def effective_dimension(model, gamma: float = 1.0, n: int = 1000,
                        num_theta_samples: int = 100, k: int = 100, seed: int = 0,
                        fisher_fn: Callable = empirical_fisher,
                        threads: int = 1) -> EffectiveDimensionResult:
    kap = kappa(gamma, n)
    if kap <= 1.0:
        raise ValueError(f"kappa = {kap:.4g} <= 1 for gamma={gamma}, n={n}")
    d = model.num_params
    samples = sample_fishers(model, num_theta_samples, k, seed, fisher_fn, threads)
    try:
        value = effective_dimension_from_fishers(normalize_fisher(samples, d), gamma, n)
    except DegenerateFisherError:
        value = 0.0
    return EffectiveDimensionResult(gamma, n, kap, value, num_theta_samples, k, seed, d)


def frac_below(eigenvalues, c: float = 1e-2) -> float:
    """Fraction of eigenvalues below ``c * max``; 1.0 when every eigenvalue is zero."""
    eig = np.asarray(eigenvalues, dtype=np.float64)
    top = eig.max() if eig.size else 0.0
    if top <= 0.0:
        return 1.0
    return float(np.mean(eig < c * top))


# ---------------------------------------------------------------------------
# CSV exports

SPECTRUM_HEADER = ("model_id", "n_qubits", "d", "eigenvalue")
ED_SWEEP_HEADER = ("n", "effective_dimension", "normalized_ed")


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_spectrum_csv(path, rows) -> None:
    """``rows``: iterables of (model_id, n_qubits, d, eigenvalue)."""
    write_csv(path, SPECTRUM_HEADER, rows)


def write_ed_sweep_csv(path, results: Sequence[EffectiveDimensionResult]) -> None:
    write_csv(path, ED_SWEEP_HEADER, [(r.n, r.value, r.normalized) for r in results])
