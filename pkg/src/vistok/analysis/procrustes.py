"""Orthogonal Procrustes alignment between two embedding spaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import orthogonal_procrustes
from scipy.stats import ortho_group

from ..errors import ShapeMismatch


@dataclass(frozen=True)
class ProcrustesResult:
    R: np.ndarray
    residual_norm: float
    layer_index: int | None = None

    @property
    def orthogonality_error(self) -> float:
        return float(np.linalg.norm(self.R.T @ self.R - np.eye(self.R.shape[0])))

    def as_dict(self) -> dict:
        return {"layer_index": self.layer_index, "residual_norm": self.residual_norm,
                "dim": int(self.R.shape[0]), "orthogonality_error": self.orthogonality_error}


def _check(X, Y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise ShapeMismatch("procrustes expects two 2-D matrices")
    if X.shape != Y.shape:
        raise ShapeMismatch(f"shapes differ: {X.shape} vs {Y.shape}")
    if X.shape[1] < 1:
        raise ShapeMismatch("matrices need at least one column")
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise ShapeMismatch("matrices must be finite")
    return X, Y


def residual(X, Y, R) -> float:
    return float(np.linalg.norm(np.asarray(X) @ R - np.asarray(Y)))


def procrustes(X, Y, layer_index: int | None = None) -> ProcrustesResult:
    """R minimising ||XR - Y||_F over the full orthogonal group (reflections allowed)."""
    X, Y = _check(X, Y)
    R, _ = orthogonal_procrustes(X, Y)
    return ProcrustesResult(R, residual(X, Y, R), layer_index)


def layerwise_procrustes(pairs: Iterable[tuple[np.ndarray, np.ndarray]]) -> list[ProcrustesResult]:
    return [procrustes(X, Y, layer_index=i) for i, (X, Y) in enumerate(pairs)]


def random_orthogonal(dim: int, n: int, seed: int = 0) -> np.ndarray:
    """``n`` Haar-distributed orthogonal ``dim x dim`` matrices, shape ``(n, dim, dim)``."""
    rng = np.random.default_rng(seed)
    if dim == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1, 1))
    return ortho_group.rvs(dim, size=n, random_state=rng).reshape(n, dim, dim)
