"""Improvement objective and the three uncertainty-quantification measures.

For a conditioned GP and a decision prefix X_1:n, every candidate location x
gets an improvement value and one of three uncertainty values:

  * sigma:    the GP posterior standard deviation at x;
  * entropy:  the location-dependent differential-entropy term
              0.5 * log det(K' + noise I) over X_1:n plus x (the additive
              entropy constant is dropped: it shifts every candidate equally
              and cannot change any dominance relation);
  * distance: an inverse-distance-weighted coverage measure that is zero at
              previously sampled points and saturates towards 1 far away,
              z(x) = (2/pi) * atan(1 / sum_j w_j(x)) with
              w_j(x) = exp(-||x - x_j||^2) / ||x - x_j||^2.

The distance measure depends only on where decisions were made, never on
their outcomes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InputError
from .gp import GPPosterior, chol_with_jitter, posterior_mean, posterior_var
from .kernels import cross_covariance, kernel_from_sqdist, pairwise_sqdist


class UQMeasure(str, enum.Enum):
    SIGMA = "sigma"
    ENTROPY = "entropy"
    DISTANCE = "distance"


ALL_MEASURES: tuple[UQMeasure, ...] = tuple(UQMeasure)


@dataclass(frozen=True)
class Incumbent:
    """Best outcome observed so far in the trace prefix."""

    y_best: float

    @classmethod
    def from_outcomes(cls, y) -> "Incumbent":
        y = np.asarray(y, dtype=float)
        if y.size == 0:
            raise InputError("incumbent needs at least one outcome")
        return cls(y_best=float(np.max(y)))


def improvement(gp: GPPosterior, x, incumbent: Incumbent):
    """mu(x) - y_best; may be negative, no clamping."""
    mu = posterior_mean(gp, x)
    return mu - incumbent.y_best


def uq_sigma(gp: GPPosterior, x):
    """GP posterior standard deviation."""
    var = posterior_var(gp, x)
    return np.sqrt(var) if isinstance(var, np.ndarray) else math.sqrt(var)


def uq_entropy(gp: GPPosterior, X_prefix, x):
    """Location-dependent entropy term of the GP over X_prefix plus x.

    Returns 0.5 * log det(K' + (noise + jitter) I) where K' is the
    (n+1) x (n+1) Gram matrix of the gp's kernel over X_prefix and x,
    evaluated via the Schur complement against the gp's cached factorization.
    Duplicating a previous decision stays finite thanks to the noise/jitter
    on the diagonal.
    """
    X_prefix = np.atleast_2d(np.asarray(X_prefix, dtype=float))
    if X_prefix.shape[0] == 0:
        raise InputError("entropy measure needs a nonempty decision prefix")
    X, single = _query_rows(x, X_prefix.shape[1])
    if gp.data is not None and gp.chol is not None and np.array_equal(X_prefix, gp.data.X):
        L, jitter = gp.chol, gp.jitter
    else:
        K = kernel_from_sqdist(gp.kernel, pairwise_sqdist(X_prefix))
        L, jitter = chol_with_jitter(K + gp.noise * np.eye(X_prefix.shape[0]), gp.kernel.amplitude)
    base = float(np.sum(np.log(np.diag(L))))  # 0.5 * log det of the n x n block
    kx = cross_covariance(gp.kernel, X, X_prefix)
    v = solve_triangular(L, kx.T, lower=True, check_finite=False)
    schur = gp.kernel.amplitude + gp.noise + jitter - np.sum(v * v, axis=0)
    schur = np.maximum(schur, 1e-300)
    h = base + 0.5 * np.log(schur)
    return float(h[0]) if single else h


def uq_distance(X_prefix, x):
    """Inverse-distance coverage measure; in [0, 1), exactly 0 at samples."""
    X_prefix = np.atleast_2d(np.asarray(X_prefix, dtype=float))
    if X_prefix.shape[0] == 0:
        raise InputError("distance measure needs a nonempty decision prefix")
    X, single = _query_rows(x, X_prefix.shape[1])
    d2 = pairwise_sqdist(X, X_prefix)
    hit = np.any(d2 == 0.0, axis=1)
    z = np.empty(X.shape[0])
    z[hit] = 0.0
    if np.any(~hit):
        d2m = d2[~hit]
        # weights underflow far from every sample -> atan(inf or huge) is the
        # correct limit; silence the benign divide/overflow signals
        with np.errstate(divide="ignore", over="ignore"):
            w = np.exp(-d2m) / d2m
            zm = (2.0 / math.pi) * np.arctan(1.0 / np.sum(w, axis=1))
        # atan saturates to pi/2 in floats far from every sample; keep the
        # mathematical range [0, 1) by backing off one ulp
        z[~hit] = np.minimum(zm, np.nextafter(1.0, 0.0))
    return float(z[0]) if single else z


def evaluate_measure(measure: UQMeasure, gp: GPPosterior, X_prefix, x):
    """Dispatch a single uncertainty measure; x may be a point or a batch."""
    if measure is UQMeasure.SIGMA:
        return uq_sigma(gp, x)
    if measure is UQMeasure.ENTROPY:
        return uq_entropy(gp, X_prefix, x)
    if measure is UQMeasure.DISTANCE:
        return uq_distance(X_prefix, x)
    raise InputError(f"unknown uncertainty measure {measure!r}")


def _query_rows(x, dim: int) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != dim:
        raise InputError(f"query dimension {X.shape[1]} != prefix dimension {dim}")
    return X, single
