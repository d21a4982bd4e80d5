"""Spectral kernels on top of one primitive: cyclic complex Jacobi sweeps.

The Hermitian eigensolver is a cyclic Jacobi iteration (backward stable,
dependency-free).  The SVD is derived from it by diagonalizing m*m and
recovering left singular vectors, the polar decomposition and pseudoinverse
from the SVD, and the numerical-range support function from the eigensolver
applied to rotated Hermitian parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    DEFAULT_TOL,
    ConvergenceError,
    NotPositiveSemidefiniteError,
    ShapeMismatchError,
    ToleranceConfig,
    as_matrix,
    hermitian_part,
    require_same_shape,
    require_square,
)

__all__ = [
    "CharPoly",
    "DiskCheckResult",
    "EigenDecomposition",
    "PolarFactors",
    "SvdDecomposition",
    "char_poly",
    "char_poly_relative_gap",
    "disk_containment_check",
    "dist_rel",
    "hermitian_eig",
    "numerical_range_support",
    "operator_norm",
    "polar_decompose",
    "pseudoinverse",
    "psd_sqrt",
    "svd",
]

# Hard cap on Jacobi sweeps; cyclic Jacobi converges quadratically, so a
# matrix that has not converged by then is a bug, not bad luck.
MAX_SWEEPS = 30

# Characteristic polynomials beyond this order are too ill-conditioned in
# double precision to be worth reporting.
CHAR_POLY_MAX_DIM = 32


@njit(cache=True)
def _jacobi_sweeps(h, v, conv_tol, max_sweeps, accumulate):
    """In-place cyclic Jacobi on the Hermitian matrix h.

    Rotations are chosen per pivot (p, q) by factoring the phase out of
    h[p, q] and solving the remaining real 2x2 problem.  When `accumulate`
    is true the product of rotations is accumulated into v (v <- v R).
    Returns (final off-diagonal Frobenius norm, sweeps used, converged).
    """
    n = h.shape[0]
    fro2 = 0.0
    for i in range(n):
        for j in range(n):
            x = h[i, j]
            fro2 += x.real * x.real + x.imag * x.imag
    fro = math.sqrt(fro2)
    if fro == 0.0:
        return 0.0, 0, True
    # Pivots this far below the stop threshold are not worth rotating.
    skip = conv_tol * fro / (10.0 * n)
    off = fro
    for sweep in range(max_sweeps):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                x = h[p, q]
                off2 += 2.0 * (x.real * x.real + x.imag * x.imag)
        off = math.sqrt(off2)
        if off <= conv_tol * fro:
            return off, sweep, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = h[p, q]
                ab = abs(beta)
                if ab <= skip:
                    continue
                phi = beta / ab
                tau = (h[q, q].real - h[p, p].real) / (2.0 * ab)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp = np.conj(phi) * s
                # h <- R* h R with R = I except R[p,p]=c, R[p,q]=s,
                # R[q,p]=-conj(phi) s, R[q,q]=conj(phi) c.
                for i in range(n):
                    hip = h[i, p]
                    hiq = h[i, q]
                    h[i, p] = c * hip - cp * hiq
                    h[i, q] = s * hip + np.conj(phi) * c * hiq
                for j in range(n):
                    hpj = h[p, j]
                    hqj = h[q, j]
                    h[p, j] = c * hpj - phi * s * hqj
                    h[q, j] = s * hpj + phi * c * hqj
                # The pivot is annihilated by construction; keep the matrix
                # exactly Hermitian so errors cannot accumulate asymmetry.
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = complex(h[p, p].real, 0.0)
                h[q, q] = complex(h[q, q].real, 0.0)
                if accumulate:
                    for i in range(n):
                        vip = v[i, p]
                        viq = v[i, q]
                        v[i, p] = c * vip - cp * viq
                        v[i, q] = s * vip + np.conj(phi) * c * viq
    off2 = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            x = h[p, q]
            off2 += 2.0 * (x.real * x.real + x.imag * x.imag)
    off = math.sqrt(off2)
    return off, max_sweeps, off <= conv_tol * fro


_DUMMY_VECTORS = np.zeros((1, 1), dtype=np.complex128)


@njit(cache=True)
def _support_grid_kernel(m, thetas, conv_tol, max_sweeps):
    """Largest eigenvalue of the Hermitian part of e^{i theta} m, per theta."""
    n = m.shape[0]
    out = np.empty(thetas.shape[0])
    dummy = np.zeros((1, 1), dtype=np.complex128)
    for k in range(thetas.shape[0]):
        ph = complex(math.cos(thetas[k]), math.sin(thetas[k]))
        herm = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                herm[i, j] = (ph * m[i, j] + np.conj(ph * m[j, i])) / 2.0
        _off, _sweeps, ok = _jacobi_sweeps(herm, dummy, conv_tol, max_sweeps, False)
        best = herm[0, 0].real
        for i in range(1, n):
            if herm[i, i].real > best:
                best = herm[i, i].real
        out[k] = best if ok else np.nan
    return out


@dataclass(frozen=True)
class EigenDecomposition:
    """Hermitian eigendecomposition: values ascending, unitary vectors."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SvdDecomposition:
    """Thin SVD: u, v with orthonormal columns, singular values descending."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class PolarFactors:
    """Canonical polar factorization x = isometry @ positive.

    The isometry is a partial isometry whose initial space is the range of
    the positive factor, so ker(isometry) = ker(x).
    """

    isometry: np.ndarray
    positive: np.ndarray


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial; coefficients[i] multiplies lambda^i."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class DiskCheckResult:
    """Verdict of a numerical-range disk containment test.

    max_violation is the largest signed excess of the support function over
    the disk radius across the angle grid; negative means strictly inside.
    """

    passed: bool
    max_violation: float


def hermitian_eig(h, tol: ToleranceConfig = DEFAULT_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    The input is symmetrized as (h + h*)/2 before iterating; callers are
    expected to pass matrices that are Hermitian up to roundoff.
    """
    h = require_square(as_matrix(h))
    work = np.ascontiguousarray((h + h.conj().T) / 2.0)
    n = work.shape[0]
    vectors = np.eye(n, dtype=np.complex128)
    off, _sweeps, converged = _jacobi_sweeps(
        work, vectors, tol.convergence_tol, MAX_SWEEPS, True
    )
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge in {MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {off:.3e})"
        )
    values = work.diagonal().real.copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], np.ascontiguousarray(vectors[:, order]))


def _eigenvalues_only(h: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Unsorted eigenvalues of an already-Hermitian array (no checks)."""
    work = np.ascontiguousarray(h)
    off, _sweeps, converged = _jacobi_sweeps(
        work, _DUMMY_VECTORS, tol.convergence_tol, MAX_SWEEPS, False
    )
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge in {MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {off:.3e})"
        )
    return work.diagonal().real.copy()


def svd(m, tol: ToleranceConfig = DEFAULT_TOL) -> SvdDecomposition:
    """Thin SVD computed as an eigendecomposition of m*m plus column recovery.

    Right singular vectors come from the Jacobi eigensolver on m*m.  Each
    singular value is then recomputed as ||m v_i||: for a numerically zero
    direction the eigenvalue of m*m only bounds sigma^2 by roundoff * ||m||^2
    (about 1e-8 ||m|| after the square root), while the recovered column norm
    stays at roundoff * ||m||, which is what makes rank cutoffs meaningful.
    Left singular vectors are m v_i / sigma_i for sigma_i above the rank
    cutoff, re-orthonormalized, and completed from canonical basis vectors
    below it.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    k = min(rows, cols)
    gram = m.conj().T @ m
    eig = hermitian_eig(gram, tol)
    images = m @ eig.vectors
    sigmas = np.sqrt(np.sum(np.abs(images) ** 2, axis=0))
    order = np.argsort(-sigmas, kind="stable")[:k]
    sigmas = sigmas[order]
    right = eig.vectors[:, order]
    images = images[:, order]
    sigma_max = sigmas[0] if k > 0 else 0.0
    cutoff = tol.rank_tol * sigma_max
    left = np.zeros((rows, k), dtype=np.complex128)
    for i in range(k):
        if sigma_max > 0.0 and sigmas[i] > cutoff:
            col = images[:, i] / sigmas[i]
        else:
            col = _fresh_basis_column(left, i, rows)
        # Modified Gram-Schmidt against the columns already placed keeps the
        # left factor orthonormal even when singular values cluster.
        for j in range(i):
            col = col - left[:, j] * (left[:, j].conj() @ col)
        norm = np.linalg.norm(col)
        if norm < 0.5:
            col = _fresh_basis_column(left, i, rows)
            norm = np.linalg.norm(col)
        left[:, i] = col / norm
    return SvdDecomposition(left, sigmas, right)


def _fresh_basis_column(left: np.ndarray, upto: int, rows: int) -> np.ndarray:
    """A canonical basis vector orthogonalized against left[:, :upto]."""
    for idx in range(rows):
        col = np.zeros(rows, dtype=np.complex128)
        col[idx] = 1.0
        for j in range(upto):
            col = col - left[:, j] * (left[:, j].conj() @ col)
        if np.linalg.norm(col) > 0.5:
            return col
    raise ConvergenceError("failed to complete an orthonormal basis")


def operator_norm(m, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest singular value, via the smaller of the two Gram matrices."""
    m = as_matrix(m)
    if m.shape[0] >= m.shape[1]:
        gram = m.conj().T @ m
    else:
        gram = m @ m.conj().T
    gram = (gram + gram.conj().T) / 2.0
    values = _eigenvalues_only(gram, tol)
    top = float(values.max(initial=0.0))
    return math.sqrt(top) if top > 0.0 else 0.0


def dist_rel(a, b, scale: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Operator-norm distance between same-shape matrices, divided by scale."""
    a, b = as_matrix(a), as_matrix(b)
    require_same_shape(a, b)
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    return operator_norm(a - b, tol) / scale


def psd_sqrt(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Unique PSD square root of a Hermitian PSD matrix.

    Eigenvalues in [-eq_tol * ||a||, rank_tol * ||a||] are treated as exact
    zeros: the lower band absorbs roundoff negativity, the upper band keeps
    numerically-zero directions out of the root's range (and therefore out
    of any later pseudoinverse).  Eigenvalues below -10 * eq_tol * ||a|| mean
    the input is genuinely indefinite and are an error.
    """
    a = require_square(as_matrix(a))
    eig = hermitian_eig(a, tol)
    values = eig.values
    norm = float(np.abs(values).max(initial=0.0))
    if norm == 0.0:
        return np.zeros_like(a)
    if values[0] < -10.0 * tol.eq_tol * norm:
        raise NotPositiveSemidefiniteError(
            f"matrix has eigenvalue {values[0]:.6e} < "
            f"{-10.0 * tol.eq_tol * norm:.6e}; not positive semidefinite"
        )
    clipped = np.where(values > tol.rank_tol * norm, values, 0.0)
    root = (eig.vectors * np.sqrt(clipped)) @ eig.vectors.conj().T
    return (root + root.conj().T) / 2.0


def pseudoinverse(m, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with a relative singular-value cutoff."""
    m = as_matrix(m)
    dec = svd(m, tol)
    sigmas = dec.singular_values
    if sigmas.size == 0 or sigmas[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    keep = sigmas > tol.rank_tol * sigmas[0]
    inv = np.zeros_like(sigmas)
    inv[keep] = 1.0 / sigmas[keep]
    return (dec.v * inv) @ dec.u.conj().T


def polar_decompose(x, tol: ToleranceConfig = DEFAULT_TOL) -> PolarFactors:
    """Canonical polar decomposition x = U |x| of a square matrix.

    U is the sum of u_i v_i* over singular triples with sigma_i above the
    rank cutoff, so U's initial space equals the range of |x| and
    ker(U) = ker(x).  The positive factor drops sub-cutoff singular values,
    keeping its kernel aligned with U's.
    """
    x = require_square(as_matrix(x))
    dec = svd(x, tol)
    sigmas = dec.singular_values
    if sigmas.size == 0 or sigmas[0] == 0.0:
        n = x.shape[0]
        return PolarFactors(
            np.zeros((n, n), dtype=np.complex128),
            np.zeros((n, n), dtype=np.complex128),
        )
    keep = sigmas > tol.rank_tol * sigmas[0]
    isometry = dec.u[:, keep] @ dec.v[:, keep].conj().T
    kept_sigmas = np.where(keep, sigmas, 0.0)
    positive = (dec.v * kept_sigmas) @ dec.v.conj().T
    positive = (positive + positive.conj().T) / 2.0
    return PolarFactors(isometry, positive)


def numerical_range_support(m, theta: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Support function of the numerical range in direction theta.

    Returns max over unit x of Re(e^{i theta} <m x, x>), i.e. the largest
    eigenvalue of the Hermitian part of e^{i theta} m.  Sampling theta over
    a grid reconstructs the closed numerical range as an intersection of
    half-planes.
    """
    m = require_square(as_matrix(m))
    out = _support_grid_kernel(
        np.ascontiguousarray(m),
        np.array([float(theta)]),
        tol.convergence_tol,
        MAX_SWEEPS,
    )
    value = float(out[0])
    if math.isnan(value):
        raise ConvergenceError("Jacobi sweeps did not converge in support evaluation")
    return value


def support_profile(m, thetas, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """numerical_range_support evaluated on an array of angles."""
    m = require_square(as_matrix(m))
    out = _support_grid_kernel(
        np.ascontiguousarray(m),
        np.ascontiguousarray(np.asarray(thetas, dtype=np.float64)),
        tol.convergence_tol,
        MAX_SWEEPS,
    )
    if np.any(np.isnan(out)):
        raise ConvergenceError("Jacobi sweeps did not converge in support evaluation")
    return out


def disk_containment_check(
    m,
    center: complex,
    radius: float,
    grid_size: int = 256,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> DiskCheckResult:
    """Certify that the numerical range of m lies in a closed disk.

    Checks numerical_range_support(m - center I, theta) <= radius at
    grid_size uniform angles, with slack eq_tol * max(radius, ||m||).
    Because the spectrum is contained in the closure of the numerical
    range, a pass also certifies spectral containment in the disk.
    """
    m = require_square(as_matrix(m))
    if radius < 0.0:
        raise ValueError(f"radius must be nonnegative, got {radius!r}")
    if grid_size < 8:
        raise ValueError(f"grid_size must be >= 8, got {grid_size}")
    shifted = m - complex(center) * np.eye(m.shape[0], dtype=np.complex128)
    thetas = 2.0 * np.pi * np.arange(grid_size) / grid_size
    support = support_profile(shifted, thetas, tol)
    max_violation = float(np.max(support) - radius)
    slack = tol.eq_tol * max(radius, operator_norm(m, tol))
    return DiskCheckResult(max_violation <= slack, max_violation)


def char_poly(m, tol: ToleranceConfig = DEFAULT_TOL) -> CharPoly:
    """Monic characteristic polynomial by the Faddeev-LeVerrier recurrence."""
    m = require_square(as_matrix(m))
    n = m.shape[0]
    if n > CHAR_POLY_MAX_DIM:
        raise ValueError(
            f"char_poly is limited to dimension {CHAR_POLY_MAX_DIM}, got {n}"
        )
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[n] = 1.0
    work = np.zeros_like(m)
    identity = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        work = m @ work + coeffs[n - k + 1] * identity
        coeffs[n - k] = -np.trace(m @ work) / k
    return CharPoly(coeffs)


def char_poly_relative_gap(p: CharPoly, q: CharPoly, scale_base: float) -> float:
    """Worst relative disagreement between two same-degree monic polynomials.

    Coefficient i is compared against max(|p_i|, |q_i|, scale_base^(n-i)),
    where scale_base bounds the norm of the underlying matrix; this keeps the
    comparison meaningful for coefficients that vanish by cancellation.
    """
    if p.degree != q.degree:
        raise ShapeMismatchError(
            f"degree mismatch: {p.degree} vs {q.degree}"
        )
    n = p.degree
    base = max(float(scale_base), 0.0)
    worst = 0.0
    for i in range(n + 1):
        a, b = p.coefficients[i], q.coefficients[i]
        floor = base ** (n - i) if base > 0.0 else 0.0
        denom = max(abs(a), abs(b), floor)
        if denom == 0.0:
            continue
        gap = abs(a - b) / denom
        worst = max(worst, gap)
    return worst
