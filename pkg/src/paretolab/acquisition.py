"""Improvement-based acquisition functions and Thompson sampling.

PI, EI and UCB combine the GP posterior mean and standard deviation; the
optional offset ``xi`` shifts the improvement target above the incumbent to
push PI/EI towards exploration. Degenerate zero-variance points use the
standard limit conventions: PI becomes the indicator of positive offset
improvement and EI becomes its positive part.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .errors import InputError, NumericalError
from .gp import GPPosterior, chol_with_jitter, posterior_cov, posterior_mean, posterior_var
from .uncertainty import Incumbent

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def _mu_sigma(gp: GPPosterior, x):
    single = np.asarray(x).ndim == 1
    mu = np.atleast_1d(posterior_mean(gp, x))
    sigma = np.sqrt(np.atleast_1d(posterior_var(gp, x)))
    return mu, sigma, single


def pi_from_moments(mu, sigma, y_best: float, xi: float = 0.0):
    """Phi((mu - y_best - xi) / sigma); at sigma = 0, the indicator of a positive offset."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    delta = mu - y_best - xi
    out = np.where(delta > 0, 1.0, 0.0)
    pos = sigma > 0
    out[pos] = ndtr(delta[pos] / sigma[pos])
    return out


def ei_from_moments(mu, sigma, y_best: float, xi: float = 0.0):
    """delta Phi(delta/sigma) + sigma phi(delta/sigma); max(delta, 0) at sigma = 0."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    delta = mu - y_best - xi
    out = np.maximum(delta, 0.0)
    pos = sigma > 0
    z = delta[pos] / sigma[pos]
    out[pos] = delta[pos] * ndtr(z) + sigma[pos] * _norm_pdf(z)
    return out


def acq_pi(gp: GPPosterior, x, incumbent: Incumbent, xi: float = 0.0):
    """Probability of improvement over the incumbent (plus offset xi)."""
    if xi < 0:
        raise InputError(f"xi must be nonnegative, got {xi}")
    mu, sigma, single = _mu_sigma(gp, x)
    out = pi_from_moments(mu, sigma, incumbent.y_best, xi)
    return float(out[0]) if single else out


def acq_ei(gp: GPPosterior, x, incumbent: Incumbent, xi: float = 0.0):
    """Expected improvement over the incumbent (plus offset xi)."""
    if xi < 0:
        raise InputError(f"xi must be nonnegative, got {xi}")
    mu, sigma, single = _mu_sigma(gp, x)
    out = ei_from_moments(mu, sigma, incumbent.y_best, xi)
    return float(out[0]) if single else out


def acq_ucb(gp: GPPosterior, x, beta: float = 3.0):
    """Upper confidence bound mu + sqrt(beta) * sigma."""
    if beta < 0:
        raise InputError(f"beta must be nonnegative, got {beta}")
    mu, sigma, single = _mu_sigma(gp, x)
    out = mu + math.sqrt(beta) * sigma
    return float(out[0]) if single else out


def thompson_next(gp: GPPosterior, grid, seed: int) -> np.ndarray:
    """One joint posterior sample over the grid; returns the maximizing point.

    Deterministic given the seed. Raises NumericalError if the posterior
    covariance over the grid cannot be factorized even with jitter.
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.shape[0] == 0:
        raise InputError("thompson sampling needs a nonempty grid")
    mean = np.atleast_1d(posterior_mean(gp, grid))
    cov = posterior_cov(gp, grid)
    try:
        L, _ = chol_with_jitter(cov, max(gp.kernel.amplitude * gp.y_std**2, 1e-300))
    except NumericalError as exc:
        raise NumericalError(f"posterior covariance factorization failed: {exc}") from exc
    rng = np.random.default_rng(seed)
    sample = mean + L @ rng.standard_normal(grid.shape[0])
    return grid[int(np.argmax(sample))]
