"""Gaussian-process regression: conditioning, MLE fitting, posterior prediction.

The posterior mean/variance follow the standard noisy-GP equations

    mu(x)     = k(x, X) [K + noise I]^-1 y
    sigma2(x) = k(x, x) - k(x, X) [K + noise I]^-1 k(X, x)

computed through one Cholesky factorization of the regularized covariance.
Outcomes are standardized internally (zero mean, unit variance) before
fitting; externally visible means and variances are mapped back to outcome
units. Hyperparameters are estimated by maximizing the log marginal
likelihood over deterministic low-discrepancy multistarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.stats import qmc

from .domain import Box
from .errors import FitError, InputError, NumericalError
from .kernels import (
    KernelKind,
    KernelSpec,
    cross_covariance,
    kernel_from_sqdist,
    kernel_grad_log_ell_from_sqdist,
    pairwise_sqdist,
)

LOG_2PI = math.log(2.0 * math.pi)

# Diagonal regularization relative to the amplitude: start tiny so that
# noiseless fits stay interpolating (sigma at a training point is bounded by
# sqrt(noise + jitter)), escalate only when factorization actually fails.
BASE_JITTER = 1e-12
MAX_JITTER = 1e-4


@dataclass(frozen=True)
class Dataset:
    """Observed decisions and outcomes inside a box domain."""

    X: np.ndarray
    y: np.ndarray
    domain: Box

    def __post_init__(self) -> None:
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise InputError(f"|X| = {X.shape[0]} but |y| = {y.shape[0]}")
        if X.shape[0] < 1:
            raise InputError("dataset needs at least one observation")
        if X.shape[1] != self.domain.dim:
            raise InputError(f"points are {X.shape[1]}-dimensional, domain is {self.domain.dim}-dimensional")
        lo, hi = self.domain.lo, self.domain.hi
        if not (np.all(X >= lo - 1e-12) and np.all(X <= hi + 1e-12)):
            raise InputError("some points lie outside the domain box")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FitOptions:
    """Which hyperparameters are free, their bounds, and the search budget.

    Lengthscale bounds are multiples of the domain diagonal; amplitude and
    noise are variances in standardized-outcome units. ``restarts`` start
    points come from a scrambled Halton sequence; every start is scored and
    gradient descent runs from the ``local_searches`` best-scoring ones.
    The whole procedure is deterministic given ``seed``.
    """

    fit_lengthscale: bool = True
    fit_amplitude: bool = True
    fit_noise: bool = False
    lengthscale: float | None = None
    amplitude: float | None = None
    noise: float = 1e-6
    power: float = 1.5
    lengthscale_bounds: tuple[float, float] = (1e-2, 1e2)
    amplitude_bounds: tuple[float, float] = (1e-4, 1e4)
    noise_bounds: tuple[float, float] = (1e-8, 1e-1)
    restarts: int = 8
    local_searches: int = 2
    max_iter: int = 60
    seed: int = 0
    standardize: bool = True


@dataclass
class GPPosterior:
    """A conditioned GP; immutable after construction and safe to share.

    All stored quantities live in the standardized-outcome space; ``y_mean``
    and ``y_std`` map predictions back to outcome units. ``chol`` factors
    (K + noise I + jitter I) lower-triangularly and ``alpha`` caches its
    solve against the (standardized) outcomes.
    """

    kernel: KernelSpec
    data: Dataset | None
    noise: float
    jitter: float
    y_mean: float
    y_std: float
    chol: np.ndarray | None
    alpha: np.ndarray | None
    lml: float = field(default=math.nan)

    @classmethod
    def prior(cls, kernel: KernelSpec) -> "GPPosterior":
        """The no-data prior: mean 0, variance = amplitude everywhere."""
        return cls(kernel=kernel, data=None, noise=0.0, jitter=0.0,
                   y_mean=0.0, y_std=1.0, chol=None, alpha=None)

    @property
    def n(self) -> int:
        return 0 if self.data is None else self.data.n


def chol_with_jitter(A: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of A + jitter*I, escalating jitter x10 on failure.

    ``scale`` sets the jitter unit (the kernel amplitude); returns the factor
    and the jitter actually applied.
    """
    n = A.shape[0]
    jitter = BASE_JITTER * scale
    while True:
        try:
            L = cholesky(A + jitter * np.eye(n), lower=True, check_finite=False)
            return L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > MAX_JITTER * scale:
                raise NumericalError(
                    f"covariance not positive definite even with jitter {jitter:.1e} "
                    f"(n={n}, amplitude={scale:.3g})"
                )


def _standardize(y: np.ndarray, enabled: bool) -> tuple[np.ndarray, float, float]:
    if not enabled:
        return y.copy(), 0.0, 1.0
    mean = float(np.mean(y))
    std = float(np.std(y))
    if std < 1e-12 * max(1.0, abs(mean)):
        # constant targets: center only
        return y - mean, mean, 1.0
    return (y - mean) / std, mean, std


def condition_gp(data: Dataset, kernel: KernelSpec, noise: float,
                 standardize: bool = True) -> GPPosterior:
    """Condition a GP with explicit hyperparameters (no fitting).

    ``noise`` is the observation variance in standardized-outcome units.
    """
    y_int, y_mean, y_std = _standardize(data.y, standardize)
    K = kernel_from_sqdist(kernel, pairwise_sqdist(data.X))
    A = K + noise * np.eye(data.n)
    L, jitter = chol_with_jitter(A, kernel.amplitude)
    alpha = cho_solve((L, True), y_int, check_finite=False)
    gp = GPPosterior(kernel=kernel, data=data, noise=noise, jitter=jitter,
                     y_mean=y_mean, y_std=y_std, chol=L, alpha=alpha)
    gp.lml = log_marginal_likelihood(gp)
    return gp


def log_marginal_likelihood(gp: GPPosterior) -> float:
    """Log marginal likelihood of the (standardized) outcomes under the GP.

    The log-determinant includes the stabilizing jitter actually applied to
    the factorization.
    """
    if gp.data is None or gp.chol is None or gp.alpha is None:
        raise InputError("log marginal likelihood requires a conditioned GP")
    y_int = (gp.data.y - gp.y_mean) / gp.y_std
    quad = float(y_int @ gp.alpha)
    logdet = 2.0 * float(np.sum(np.log(np.diag(gp.chol))))
    value = -0.5 * quad - 0.5 * logdet - 0.5 * gp.data.n * LOG_2PI
    if not math.isfinite(value):
        raise NumericalError("log marginal likelihood is not finite")
    return value


def _neg_lml_and_grad(theta: np.ndarray, layout: dict, d2: np.ndarray,
                      y: np.ndarray, fixed: dict, eye: np.ndarray) -> tuple[float, np.ndarray]:
    """Negative LML and gradient w.r.t. the free log-parameters."""
    n = y.shape[0]
    ell = math.exp(theta[layout["ell"]]) if "ell" in layout else fixed["ell"]
    s2 = math.exp(theta[layout["s2"]]) if "s2" in layout else fixed["s2"]
    lam2 = math.exp(theta[layout["lam2"]]) if "lam2" in layout else fixed["lam2"]
    spec = KernelSpec(kind=fixed["kind"], lengthscale=ell, amplitude=s2, power=fixed["power"])
    K = kernel_from_sqdist(spec, d2)
    jitter = BASE_JITTER * s2
    A = K + (lam2 + jitter) * eye
    try:
        L = cholesky(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros_like(theta)
    alpha = cho_solve((L, True), y, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    lml = -0.5 * float(y @ alpha) - 0.5 * logdet - 0.5 * n * LOG_2PI
    if not math.isfinite(lml):
        return 1e25, np.zeros_like(theta)

    Ainv = cho_solve((L, True), eye, check_finite=False)
    grad = np.zeros_like(theta)
    for name, idx in layout.items():
        if name == "ell":
            dA = kernel_grad_log_ell_from_sqdist(spec, d2)
            quad = float(alpha @ (dA @ alpha))
            tr = float(np.sum(Ainv * dA))
        elif name == "s2":
            # dA = K + jitter*I (the amplitude scales both)
            quad = float(alpha @ (K @ alpha)) + jitter * float(alpha @ alpha)
            tr = float(np.sum(Ainv * K)) + jitter * float(np.trace(Ainv))
        else:  # lam2: dA = lam2 * I
            quad = lam2 * float(alpha @ alpha)
            tr = lam2 * float(np.trace(Ainv))
        grad[idx] = 0.5 * quad - 0.5 * tr
    return -lml, -grad


def fit_gp(data: Dataset, kind: KernelKind, options: FitOptions = FitOptions()) -> GPPosterior:
    """Fit hyperparameters by multistart MLE, then condition.

    With every hyperparameter fixed this reduces to conditioning only.
    Raises FitError if every restart fails numerically.
    """
    if not isinstance(data, Dataset):
        raise InputError("fit_gp expects a Dataset")
    diag = data.domain.diagonal()
    y_int, y_mean, y_std = _standardize(data.y, options.standardize)

    fixed = {
        "kind": kind,
        "power": options.power,
        "ell": options.lengthscale if options.lengthscale is not None else 0.2 * diag,
        "s2": options.amplitude if options.amplitude is not None else 1.0,
        "lam2": options.noise,
    }
    layout: dict[str, int] = {}
    bounds: list[tuple[float, float]] = []
    if options.fit_lengthscale:
        layout["ell"] = len(bounds)
        bounds.append((math.log(options.lengthscale_bounds[0] * diag),
                       math.log(options.lengthscale_bounds[1] * diag)))
    if options.fit_amplitude:
        layout["s2"] = len(bounds)
        bounds.append((math.log(options.amplitude_bounds[0]),
                       math.log(options.amplitude_bounds[1])))
    if options.fit_noise:
        layout["lam2"] = len(bounds)
        bounds.append((math.log(options.noise_bounds[0]),
                       math.log(options.noise_bounds[1])))

    if layout:
        d2 = pairwise_sqdist(data.X)
        eye = np.eye(data.n)
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        # Launch restarts from the central half of the log-range: extreme
        # corners (e.g. lengthscale 1e-2 x diagonal) cost many line-search
        # steps and never win; the optimizer may still walk to the bounds.
        start_lo = lo + 0.25 * (hi - lo)
        start_hi = hi - 0.25 * (hi - lo)
        halton = qmc.Halton(d=len(bounds), scramble=True, seed=options.seed)
        starts = start_lo + halton.random(options.restarts) * (start_hi - start_lo)

        scores = np.array([
            _neg_lml_and_grad(theta0, layout, d2, y_int, fixed, eye)[0]
            for theta0 in starts
        ])
        n_local = max(1, min(options.local_searches, options.restarts))
        chosen = np.argsort(scores, kind="stable")[:n_local]

        best_theta = None
        best_value = math.inf
        for idx in sorted(chosen):  # ascending restart index for deterministic ties
            try:
                res = minimize(
                    _neg_lml_and_grad, starts[idx], args=(layout, d2, y_int, fixed, eye),
                    jac=True, method="L-BFGS-B", bounds=bounds,
                    options={"maxiter": options.max_iter, "ftol": 1e-7, "gtol": 1e-5},
                )
            except (np.linalg.LinAlgError, ValueError):
                continue
            if math.isfinite(res.fun) and res.fun < best_value:
                best_value = float(res.fun)
                best_theta = res.x
        if best_theta is None:
            raise FitError(f"all {options.restarts} restarts failed for kernel {kind.value}")
        if "ell" in layout:
            fixed["ell"] = math.exp(best_theta[layout["ell"]])
        if "s2" in layout:
            fixed["s2"] = math.exp(best_theta[layout["s2"]])
        if "lam2" in layout:
            fixed["lam2"] = math.exp(best_theta[layout["lam2"]])

    spec = KernelSpec(kind=kind, lengthscale=fixed["ell"], amplitude=fixed["s2"],
                      power=fixed["power"])
    return condition_gp(data, spec, noise=fixed["lam2"], standardize=options.standardize)


def _query_matrix(gp: GPPosterior, x) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if gp.data is not None and X.shape[1] != gp.data.dim:
        raise InputError(f"query dimension {X.shape[1]} != training dimension {gp.data.dim}")
    return X, single


def posterior_mean(gp: GPPosterior, x):
    """Posterior mean in outcome units; scalar for a single point, array for a batch."""
    X, single = _query_matrix(gp, x)
    if gp.data is None:
        mu = np.zeros(X.shape[0])
    else:
        kx = cross_covariance(gp.kernel, X, gp.data.X)
        mu = gp.y_mean + gp.y_std * (kx @ gp.alpha)
    return float(mu[0]) if single else mu


def posterior_var(gp: GPPosterior, x):
    """Posterior variance in squared outcome units, clamped to [0, k(x,x)]."""
    X, single = _query_matrix(gp, x)
    s2 = gp.kernel.amplitude
    if gp.data is None:
        var = np.full(X.shape[0], s2)
    else:
        kx = cross_covariance(gp.kernel, X, gp.data.X)
        v = solve_triangular(gp.chol, kx.T, lower=True, check_finite=False)
        var = s2 - np.sum(v * v, axis=0)
        np.clip(var, 0.0, s2, out=var)
    var = gp.y_std**2 * var
    return float(var[0]) if single else var


def posterior_cov(gp: GPPosterior, X) -> np.ndarray:
    """Joint posterior covariance over a batch of points, in squared outcome units."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Kxx = kernel_from_sqdist(gp.kernel, pairwise_sqdist(X))
    if gp.data is None:
        cov = Kxx
    else:
        kx = cross_covariance(gp.kernel, X, gp.data.X)
        v = solve_triangular(gp.chol, kx.T, lower=True, check_finite=False)
        cov = Kxx - v.T @ v
        cov = 0.5 * (cov + cov.T)
    return gp.y_std**2 * cov
