"""Dense complex-matrix substrate: validation, arithmetic, norms, seeded ensembles.

Everything downstream assumes double-precision complex matrices with finite
entries.  All functions are pure; nothing here mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "NotPositiveSemidefiniteError",
    "PairSpecError",
    "ShapeMismatchError",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "add",
    "adjoint",
    "as_matrix",
    "frobenius_norm",
    "hermitian_part",
    "mul",
    "random_ginibre",
    "require_same_shape",
    "require_square",
]


class ShapeMismatchError(ValueError):
    """Operands do not conform (wrong shapes for the requested operation)."""


class ConvergenceError(RuntimeError):
    """An iterative kernel exhausted its sweep budget before converging."""


class NotPositiveSemidefiniteError(ValueError):
    """Input is decisively indefinite where a PSD matrix is required."""


class PairSpecError(ValueError):
    """Support or isometry constraints of a generator spec are violated."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative thresholds shared across the pipeline.

    eq_tol gates every "equals zero" decision, rank_tol every numerical-rank
    cutoff, convergence_tol the iterative-solver stop rule.  All decisions
    downstream are made relative to an explicit scale so that conclusions are
    invariant under rescaling the input matrices.
    """

    eq_tol: float = 1e-9
    rank_tol: float = 1e-12
    convergence_tol: float = 1e-13

    def __post_init__(self) -> None:
        for name in ("eq_tol", "rank_tol", "convergence_tol"):
            value = getattr(self, name)
            if not (value >= 0.0):
                raise ValueError(f"{name} must be nonnegative, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatchError(f"expected a 2-D matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def require_square(m: np.ndarray) -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def add(a, b) -> np.ndarray:
    """Entrywise sum of two same-shape matrices."""
    a, b = as_matrix(a), as_matrix(b)
    require_same_shape(a, b)
    return a + b


def mul(a, b) -> np.ndarray:
    """Matrix product; the inner dimensions must agree."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def hermitian_part(a) -> np.ndarray:
    """(a + a*)/2, the Hermitian part of a square matrix."""
    a = require_square(as_matrix(a))
    return (a + a.conj().T) / 2.0


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entry moduli."""
    a = as_matrix(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Draw a rows x cols matrix of i.i.d. standard complex Gaussians."""
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def random_ginibre(n: int, seed: int) -> np.ndarray:
    """n x n matrix of i.i.d. complex Gaussians (mean 0, unit variance).

    Deterministic in (n, seed): equal arguments give bit-identical output.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return ginibre(np.random.default_rng(seed), n, n)
