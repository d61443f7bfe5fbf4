"""Closed-form estimator variances for circuit-reuse sampling.

Outcome model: X ~ Bernoulli(P) with P random across circuits,
E[P] = mu, Var[P] = sigma^2. Scheme 1 reuses each of k circuits for l
shots; scheme 2 draws a fresh circuit for each of n = l*k shots. The
Monte Carlo realisation draws P from a Beta distribution with matched
moments (support guaranteed inside [0, 1]).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng


@dataclass(frozen=True)
class TwoLevelModel:
    mu: float
    sigma_sq: float
    k: int
    l: int

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must be in [0, 1]")
        if self.sigma_sq < 0:
            raise ValueError("sigma^2 must be >= 0")
        if self.mu ** 2 + self.sigma_sq > self.mu + 1e-15:
            raise ValueError("invalid moment pair: mu^2 + sigma^2 > mu")
        if self.k < 1 or self.l < 1:
            raise ValueError("k and l must be >= 1")

    @property
    def n(self) -> int:
        return self.k * self.l


def var_scheme1(model: TwoLevelModel) -> float:
    """Estimator variance when each circuit is reused l times."""
    lk = model.l * model.k
    return (model.mu - (model.mu ** 2 + model.sigma_sq)) / lk \
        + model.sigma_sq / model.k


def var_scheme2(model: TwoLevelModel) -> float:
    """Estimator variance with a fresh circuit per shot."""
    return (model.mu - model.mu ** 2) / model.n


def samples_required(mu: float, sigma_sq: float, l: int,
                     target_accuracy: float) -> int:
    """Smallest n = l*k with sqrt(var_scheme1) <= target_accuracy.

    Substituting n = l*k gives var1 = (mu - mu^2 + sigma^2 (l-1)) / n, so
    the requirement is always attainable and reduces to a ceiling. For
    l = 1 this is the familiar (mu - mu^2) / target^2.
    """
    if target_accuracy <= 0:
        raise ValueError("target_accuracy must be > 0")
    if l < 1:
        raise ValueError("l must be >= 1")
    if mu ** 2 + sigma_sq > mu + 1e-15:
        raise ValueError("invalid moment pair: mu^2 + sigma^2 > mu")
    numer = mu - mu ** 2 + sigma_sq * (l - 1)
    if numer <= 0:
        return l  # degenerate P: a single batch suffices
    k = math.ceil(numer / (l * target_accuracy ** 2))
    return l * max(k, 1)


def beta_params(mu: float, sigma_sq: float):
    """Beta(a, b) with mean mu and variance sigma^2."""
    if sigma_sq <= 0:
        raise ValueError("need sigma^2 > 0 for a Beta realisation")
    if sigma_sq >= mu * (1 - mu):
        raise ValueError("sigma^2 must be < mu (1 - mu) for a Beta law")
    total = mu * (1 - mu) / sigma_sq - 1.0
    return mu * total, (1 - mu) * total


def monte_carlo_variance(mu: float, sigma_sq: float, k: int, l: int,
                         scheme: int, replications: int, seed: int = 0,
                         chunks: int = 100):
    """Empirical estimator variance plus a chunked standard error.

    Returns (variance_estimate, stderr) where stderr is the standard error
    of the chunk-wise variance estimates (replications split into
    `chunks` equal groups).
    """
    if scheme not in (1, 2):
        raise ValueError("scheme must be 1 or 2")
    gen = _rng.substream(seed, 0x5A01, scheme, k, l)
    n = k * l
    per_chunk = max(replications // chunks, 1)
    chunk_vars = []
    all_means = []
    for _ in range(chunks):
        if scheme == 1:
            if sigma_sq > 0:
                a, b = beta_params(mu, sigma_sq)
                p = gen.beta(a, b, size=(per_chunk, k))
            else:
                p = np.full((per_chunk, k), mu)
            hits = gen.binomial(l, p)
            means = hits.sum(axis=1) / n
        else:
            if sigma_sq > 0:
                a, b = beta_params(mu, sigma_sq)
                p = gen.beta(a, b, size=(per_chunk, n))
            else:
                p = np.full((per_chunk, n), mu)
            means = gen.binomial(1, p).sum(axis=1) / n
        chunk_vars.append(float(np.var(means, ddof=1)))
        all_means.append(means)
    chunk_vars = np.asarray(chunk_vars)
    overall = float(np.var(np.concatenate(all_means), ddof=1))
    stderr = float(chunk_vars.std(ddof=1) / math.sqrt(len(chunk_vars)))
    return overall, stderr
