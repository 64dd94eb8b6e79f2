"""Flat Kaehler space R^{2m} = C^m.

The complex structure pairs consecutive coordinates: with 1-based indices,
J e_{2i-1} = e_{2i} and J e_{2i} = -e_{2i-1}. The metric is Euclidean and the
Levi-Civita connection is the plain directional derivative, so J (a constant
matrix) is parallel for free; nothing at runtime needs to check that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, DimensionMismatch

PAIRING = "consecutive"


@dataclass(frozen=True)
class AmbientSpace:
    complex_dim: int
    pairing: str = PAIRING

    def __post_init__(self):
        if self.complex_dim < 1:
            raise ConfigError("complex dimension must be positive")
        if self.pairing != PAIRING:
            raise ConfigError(f"unsupported J pairing {self.pairing!r}; only {PAIRING!r} is implemented")

    @property
    def real_dim(self) -> int:
        return 2 * self.complex_dim

    @cached_property
    def J(self) -> np.ndarray:
        n = self.real_dim
        j = np.zeros((n, n))
        for i in range(0, n, 2):
            j[i + 1, i] = 1.0
            j[i, i + 1] = -1.0
        return j

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.real_dim:
            raise DimensionMismatch(f"vector of length {v.shape[0]} in R^{self.real_dim}")
        return v

    def apply_J(self, v) -> np.ndarray:
        """J applied to a vector (or to each column of an (N, k) array)."""
        v = self._check(v)
        out = np.empty_like(v)
        out[0::2] = -v[1::2]
        out[1::2] = v[0::2]
        return out

    def check_kaehler_compatibility(self, x, y) -> float:
        """|<JX, JY> - <X, Y>|."""
        x, y = self._check(x), self._check(y)
        return abs(float(self.apply_J(x) @ self.apply_J(y) - x @ y))
