"""Stationary covariance kernels.

Five isotropic kernels are supported (squared exponential, exponential,
power exponential, Matern 3/2, Matern 5/2), each of the form
``amplitude * rho(||x - x'||)`` with ``rho(0) = 1``. Evaluation is
vectorized over pairwise squared distances so Gram matrices and
cross-covariances share one code path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)


class KernelKind(str, enum.Enum):
    SQUARED_EXPONENTIAL = "SquaredExponential"
    EXPONENTIAL = "Exponential"
    POWER_EXPONENTIAL = "PowerExponential"
    MATERN32 = "Matern32"
    MATERN52 = "Matern52"


ALL_KERNELS: tuple[KernelKind, ...] = tuple(KernelKind)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    ``lengthscale`` is in input-coordinate units, ``amplitude`` is the
    output-variance scale s^2, and ``power`` is only used by the power
    exponential family (must lie in (0, 2]).
    """

    kind: KernelKind
    lengthscale: float = 1.0
    amplitude: float = 1.0
    power: float = 1.5

    def __post_init__(self) -> None:
        if self.lengthscale <= 0:
            raise InputError(f"lengthscale must be positive, got {self.lengthscale}")
        if self.amplitude <= 0:
            raise InputError(f"amplitude must be positive, got {self.amplitude}")
        if not (0.0 < self.power <= 2.0):
            raise InputError(f"power must lie in (0, 2], got {self.power}")

    def with_params(self, **kwargs) -> "KernelSpec":
        return replace(self, **kwargs)


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise InputError(f"points must be a (n, d) array, got shape {X.shape}")
    return X


def pairwise_sqdist(X, X2=None) -> np.ndarray:
    """Pairwise squared Euclidean distances between rows of X and X2.

    Computed from coordinate differences (not the quadratic expansion) so
    coincident points give exactly zero; the nonsmooth kernels are linear in
    the distance near zero and would amplify expansion round-off.
    """
    X = _as_points(X)
    X2 = X if X2 is None else _as_points(X2)
    if X.shape[1] != X2.shape[1]:
        raise InputError(f"dimension mismatch: {X.shape[1]} vs {X2.shape[1]}")
    diff = X[:, None, :] - X2[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kernel_from_sqdist(spec: KernelSpec, d2: np.ndarray) -> np.ndarray:
    """Covariance values for an array of squared distances."""
    ell = spec.lengthscale
    s2 = spec.amplitude
    if spec.kind is KernelKind.SQUARED_EXPONENTIAL:
        return s2 * np.exp(-0.5 * d2 / (ell * ell))
    if spec.kind is KernelKind.EXPONENTIAL:
        return s2 * np.exp(-np.sqrt(d2) / ell)
    if spec.kind is KernelKind.POWER_EXPONENTIAL:
        return s2 * np.exp(-((np.sqrt(d2) / ell) ** spec.power))
    if spec.kind is KernelKind.MATERN32:
        a = SQRT3 * np.sqrt(d2) / ell
        return s2 * (1.0 + a) * np.exp(-a)
    if spec.kind is KernelKind.MATERN52:
        a = SQRT5 * np.sqrt(d2) / ell
        return s2 * (1.0 + a + a * a / 3.0) * np.exp(-a)
    raise InputError(f"unknown kernel kind {spec.kind!r}")


def kernel_grad_log_ell_from_sqdist(spec: KernelSpec, d2: np.ndarray) -> np.ndarray:
    """d k / d log(lengthscale), used by the marginal-likelihood gradient."""
    ell = spec.lengthscale
    s2 = spec.amplitude
    if spec.kind is KernelKind.SQUARED_EXPONENTIAL:
        u = d2 / (ell * ell)
        return s2 * np.exp(-0.5 * u) * u
    if spec.kind is KernelKind.EXPONENTIAL:
        a = np.sqrt(d2) / ell
        return s2 * np.exp(-a) * a
    if spec.kind is KernelKind.POWER_EXPONENTIAL:
        ap = (np.sqrt(d2) / ell) ** spec.power
        return s2 * np.exp(-ap) * spec.power * ap
    if spec.kind is KernelKind.MATERN32:
        a = SQRT3 * np.sqrt(d2) / ell
        return s2 * a * a * np.exp(-a)
    if spec.kind is KernelKind.MATERN52:
        a = SQRT5 * np.sqrt(d2) / ell
        return s2 * (a * a / 3.0) * (1.0 + a) * np.exp(-a)
    raise InputError(f"unknown kernel kind {spec.kind!r}")


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    """Covariance between two points."""
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape:
        raise InputError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    d2 = float(np.sum((x - x2) ** 2))
    return float(kernel_from_sqdist(spec, np.asarray(d2)))


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """n x n covariance matrix over a point set; symmetric, diagonal = amplitude."""
    d2 = pairwise_sqdist(X)
    K = kernel_from_sqdist(spec, d2)
    # exact symmetry and exact amplitude on the diagonal, despite round-off
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, spec.amplitude)
    return K


def cross_covariance(spec: KernelSpec, X, X2) -> np.ndarray:
    """Covariance matrix between two point sets, shape (len(X), len(X2))."""
    return kernel_from_sqdist(spec, pairwise_sqdist(X, X2))
