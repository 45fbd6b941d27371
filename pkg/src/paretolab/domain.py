"""Axis-aligned box domains for search spaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Box:
    """Axis-aligned box: per-dimension (lower, upper) bounds."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise InputError("box bounds must be 1-D sequences of equal length")
        if not np.all(lo < hi):
            raise InputError(f"degenerate box: lower {self.lower} not strictly below upper {self.upper}")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    def diagonal(self) -> float:
        """Euclidean length of the box diagonal."""
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, x: np.ndarray, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        return bool(np.all(x >= self.lo - atol) and np.all(x <= self.hi + atol))

    def sample(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        """n uniform points, shape (n, dim)."""
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))
