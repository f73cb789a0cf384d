"""Finite-domain Gaussian-process machinery.

Kernels operate on non-negative integer indices.  Searches index each cell
locally, as offsets from the cell's left edge, so the Wiener process's
pinned origin (value 0, variance 0 at index 0) anchors at every cell
boundary and priors are translation-consistent across cells.

Kernels:

* ``wiener``: covariance ``variance * min(s, t)``, the unit-variance form
  scaled; requires non-negative indices
* ``se``: squared exponential, ``variance * exp(-d^2 / (2 ls^2))``
* ``matern52``: Matern 5/2 with variance and lengthscale

Posteriors are exact and noise-free.  Gram factorizations escalate jitter
through a fixed four-step ladder (1e-12 to 1e-6, scaled by the mean kernel
diagonal) before giving up with :class:`NumericalError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

KERNELS = ("wiener", "se", "matern52")
_JITTER_LADDER = (1e-12, 1e-10, 1e-8, 1e-6)


class NumericalError(RuntimeError):
    """Gram factorization failed even after jitter escalation."""


@dataclass(frozen=True)
class PriorSpec:
    """A Gaussian-process prior: kernel family, hyperparameters, mean constant."""

    kernel: str
    variance: float
    lengthscale: float | None = None
    mean: float = 0.0
    jitter: float = 0.0

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        if not self.variance > 0:
            raise ValueError("variance must be positive")
        if self.kernel == "wiener":
            if self.lengthscale is not None:
                raise ValueError("wiener kernel takes no lengthscale")
        elif self.lengthscale is None or not self.lengthscale > 0:
            raise ValueError(f"{self.kernel} kernel needs a positive lengthscale")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")


def wiener(variance: float = 1.0, mean: float = 0.0, jitter: float = 0.0) -> PriorSpec:
    return PriorSpec("wiener", variance, None, mean, jitter)


def squared_exponential(variance: float, lengthscale: float,
                        mean: float = 0.0, jitter: float = 0.0) -> PriorSpec:
    return PriorSpec("se", variance, lengthscale, mean, jitter)


def matern52(variance: float, lengthscale: float,
             mean: float = 0.0, jitter: float = 0.0) -> PriorSpec:
    return PriorSpec("matern52", variance, lengthscale, mean, jitter)


def prior_to_wire(spec: PriorSpec) -> dict:
    doc = {"kernel": spec.kernel, "variance": spec.variance, "mean": spec.mean}
    if spec.lengthscale is not None:
        doc["lengthscale"] = spec.lengthscale
    return doc


def prior_from_wire(doc: dict) -> PriorSpec:
    return PriorSpec(kernel=str(doc["kernel"]), variance=float(doc["variance"]),
                     lengthscale=None if doc.get("lengthscale") is None
                     else float(doc["lengthscale"]),
                     mean=float(doc.get("mean", 0.0)))


def kernel_matrix(spec: PriorSpec, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Covariance between index vectors ``s`` (rows) and ``t`` (columns)."""
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if spec.kernel == "wiener":
        if (s < 0).any() or (t < 0).any():
            raise ValueError("wiener kernel requires non-negative indices")
        return spec.variance * np.minimum.outer(s, t)
    d = np.abs(s[:, None] - t[None, :])
    if spec.kernel == "se":
        return spec.variance * np.exp(-0.5 * (d / spec.lengthscale) ** 2)
    r = np.sqrt(5.0) * d / spec.lengthscale
    return spec.variance * (1.0 + r + r * r / 3.0) * np.exp(-r)


def kernel_eval(spec: PriorSpec, s: int, t: int) -> float:
    """Scalar covariance between two indices."""
    return float(kernel_matrix(spec, np.array([s]), np.array([t]))[0, 0])


def kernel_diag(spec: PriorSpec, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if spec.kernel == "wiener":
        if (s < 0).any():
            raise ValueError("wiener kernel requires non-negative indices")
        return spec.variance * s
    return np.full(len(s), spec.variance)


def chol_with_jitter(gram: np.ndarray, base_jitter: float = 0.0) -> np.ndarray:
    """Cholesky factor of ``gram`` plus the smallest stabilizing jitter.

    Tries the four-step ladder, each step scaled by the mean diagonal and
    floored at ``base_jitter``; raises :class:`NumericalError` if all fail.
    """
    scale = max(float(np.mean(np.diag(gram))), 1.0) if gram.size else 1.0
    eye = np.eye(gram.shape[0])
    last = None
    for level in _JITTER_LADDER:
        jit = max(base_jitter, level * scale)
        try:
            return np.linalg.cholesky(gram + jit * eye)
        except np.linalg.LinAlgError as exc:
            last = exc
    raise NumericalError(
        f"Gram factorization failed after {len(_JITTER_LADDER)} jitter steps") from last


def _split_observations(observations: Sequence[tuple[int, float]]) -> tuple[np.ndarray, np.ndarray]:
    pts = np.array([p for p, _ in observations], dtype=np.int64)
    vals = np.array([v for _, v in observations], dtype=np.float64)
    if len(np.unique(pts)) != len(pts):
        raise ValueError("observation points must be distinct")
    return pts, vals


def posterior(spec: PriorSpec, observations: Sequence[tuple[int, float]],
              queries: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Exact noise-free conditioning.

    Returns posterior means and variances at ``queries`` given the observed
    (point, value) pairs; variances are clamped at zero from below.  With no
    observations this recovers the prior.
    """
    q = np.asarray(queries, dtype=np.int64)
    if not observations:
        return np.full(len(q), spec.mean), kernel_diag(spec, q)
    pts, vals = _split_observations(observations)
    L = chol_with_jitter(kernel_matrix(spec, pts, pts), spec.jitter)
    w = solve_triangular(L, vals - spec.mean, lower=True)
    V = solve_triangular(L, kernel_matrix(spec, pts, q), lower=True)
    means = spec.mean + V.T @ w
    variances = np.maximum(kernel_diag(spec, q) - np.sum(V * V, axis=0), 0.0)
    return means, variances


def log_marginal_likelihood(spec: PriorSpec,
                            observations: Sequence[tuple[int, float]]) -> float:
    """Exact GP log marginal likelihood of the observations under ``spec``."""
    pts, vals = _split_observations(observations)
    L = chol_with_jitter(kernel_matrix(spec, pts, pts), spec.jitter)
    w = solve_triangular(L, vals - spec.mean, lower=True)
    return float(-0.5 * w @ w - np.sum(np.log(np.diag(L)))
                 - 0.5 * len(pts) * np.log(2.0 * np.pi))


def sample_realization(spec: PriorSpec, points: Sequence[int], seed: int) -> np.ndarray:
    """Draw one realization of the prior at the given ascending points.

    Wiener realizations use cumulative independent Gaussian increments from
    the origin, so index 0 maps to exactly ``mean``.  Stationary kernels go
    through a factorization of the Gram matrix.  Deterministic per seed.
    """
    pts = np.asarray(points, dtype=np.int64)
    if len(pts) == 0:
        return np.empty(0)
    if (np.diff(pts) <= 0).any():
        raise ValueError("points must be strictly ascending")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if spec.kernel == "wiener":
        if pts[0] < 0:
            raise ValueError("wiener kernel requires non-negative indices")
        steps = np.diff(np.concatenate([[0], pts])).astype(np.float64)
        incr = rng.standard_normal(len(pts)) * np.sqrt(spec.variance * steps)
        return spec.mean + np.cumsum(incr)
    L = chol_with_jitter(kernel_matrix(spec, pts, pts), spec.jitter)
    return spec.mean + L @ rng.standard_normal(len(pts))
