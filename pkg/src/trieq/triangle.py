"""Triangle-equality analysis for pairs of square complex matrices.

The central objects: the defect ||X+Y| - |X| - |Y||, which vanishes exactly
when one partial isometry U realizes both polar decompositions X = U|X| and
Y = U|Y|; an extractor that produces that U as the canonical polar factor of
X + Y; generators for equality pairs and for projection counterexamples; and
a step-by-step certificate that numerically verifies the chain of identities
connecting the equality to the common isometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    PairSpecError,
    ToleranceConfig,
    as_matrix,
    frobenius_norm,
    ginibre,
    hermitian_part,
    require_same_shape,
    require_square,
)
from .spectral import (
    char_poly,
    char_poly_relative_gap,
    disk_containment_check,
    hermitian_eig,
    operator_norm,
    polar_decompose,
    pseudoinverse,
    psd_sqrt,
    svd,
)

__all__ = [
    "CommonIsometryResult",
    "EqualityPreconditionError",
    "EqualityReport",
    "IsometryMergeResult",
    "PairSpec",
    "ProofCertificate",
    "StepResult",
    "abs_val",
    "certify_proof_chain",
    "common_isometry_least_squares",
    "compute_contraction_factors",
    "extract_common_isometry",
    "make_pair_spec",
    "make_projection_counterexample",
    "pair_scale",
    "synthesize_equality_pair",
    "triangle_defect",
]


@dataclass(frozen=True)
class EqualityReport:
    """Defect ||X+Y| - |X| - |Y|| in operator norm, and the verdict."""

    defect: float
    scale: float
    holds: bool


@dataclass(frozen=True)
class CommonIsometryResult:
    """Candidate common partial isometry u with per-input relative residuals."""

    u: np.ndarray
    residual_x: float
    residual_y: float


@dataclass(frozen=True)
class PairSpec:
    """Recipe for an equality pair: x = u a, y = u b.

    u is a partial isometry whose initial space contains the ranges of the
    PSD factors a and b (u*u a = a and u*u b = b), which is exactly the
    condition under which the pair (u a, u b) satisfies the triangle
    equality with common isometry u.
    """

    u: np.ndarray
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class StepResult:
    name: str
    residual: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class ProofCertificate:
    """Intermediate objects and per-step verdicts of the equality analysis.

    abs_x, abs_y are the absolute values; iso_x, iso_y the canonical polar
    isometries; contraction_x, contraction_y the contractions splitting the
    square roots of abs_x and abs_y off the square root of their sum;
    range_projection the orthogonal projection onto ran(abs_x + abs_y); and
    product_root the PSD square root of the sandwiched product used by the
    spectral disk step.
    """

    abs_x: np.ndarray
    abs_y: np.ndarray
    iso_x: np.ndarray
    iso_y: np.ndarray
    contraction_x: np.ndarray
    contraction_y: np.ndarray
    range_projection: np.ndarray
    product_root: np.ndarray
    steps: tuple[StepResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(step.passed for step in self.steps)

    def step(self, name: str) -> StepResult:
        for record in self.steps:
            if record.name == name:
                return record
        raise KeyError(name)


@dataclass(frozen=True)
class IsometryMergeResult:
    """Least-squares candidate for one isometry agreeing with v on ran(a)
    and with w on ran(b), plus the residuals deciding whether it exists."""

    u: np.ndarray
    map_residual: float
    isometry_residual: float


class EqualityPreconditionError(RuntimeError):
    """Raised when a certificate is requested for a pair whose triangle
    defect exceeds tolerance; carries the offending report."""

    def __init__(self, report: EqualityReport):
        super().__init__(
            f"triangle equality does not hold: defect {report.defect:.6e} "
            f"> {report.scale:.6e} * tolerance"
        )
        self.report = report


def pair_scale(x: np.ndarray, y: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Common scale max(||x||, ||y||, 1) for relative comparisons."""
    return max(operator_norm(x, tol), operator_norm(y, tol), 1.0)


def abs_val(x, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Absolute value |x| = (x*x)^{1/2}, the positive polar factor of x."""
    return polar_decompose(x, tol).positive


def triangle_defect(x, y, tol: ToleranceConfig = DEFAULT_TOL) -> EqualityReport:
    """Measure ||x+y| - |x| - |y|| and decide the triangle equality.

    The defect is always >= 0 up to roundoff and vanishes exactly when the
    equality holds; the verdict gates it at eq_tol * max(||x||, ||y||, 1).
    """
    x, y = as_matrix(x), as_matrix(y)
    require_same_shape(x, y)
    require_square(x)
    scale = pair_scale(x, y, tol)
    gap = abs_val(x + y, tol) - abs_val(x, tol) - abs_val(y, tol)
    defect = operator_norm(gap, tol)
    return EqualityReport(defect, scale, defect <= tol.eq_tol * scale)


def extract_common_isometry(
    x, y, tol: ToleranceConfig = DEFAULT_TOL
) -> CommonIsometryResult:
    """Extract the candidate common partial isometry of a pair.

    The candidate is the canonical polar factor of x + y.  When the triangle
    equality holds, |x+y| = |x| + |y| and the isometry sending (|x|+|y|)z to
    (x+y)z restricted to ran(|x|+|y|) is exactly that polar factor, so it
    satisfies u|x| = x and u|y| = y.  The residuals report how far the
    candidate is from doing so; for pairs violating the equality they stay
    bounded away from zero instead of raising.
    """
    x, y = as_matrix(x), as_matrix(y)
    require_same_shape(x, y)
    require_square(x)
    u = polar_decompose(x + y, tol).isometry
    scale = pair_scale(x, y, tol)
    residual_x = operator_norm(u @ abs_val(x, tol) - x, tol) / scale
    residual_y = operator_norm(u @ abs_val(y, tol) - y, tol) / scale
    return CommonIsometryResult(u, residual_x, residual_y)


def _check_pair_spec(spec: PairSpec, tol: ToleranceConfig) -> None:
    u, a, b = spec.u, spec.a, spec.b
    law = operator_norm(u @ u.conj().T @ u - u, tol)
    if law > 10.0 * tol.eq_tol:
        raise PairSpecError(f"u is not a partial isometry: ||uu*u - u|| = {law:.3e}")
    initial = u.conj().T @ u
    for name, m in (("a", a), ("b", b)):
        norm = operator_norm(m, tol)
        drift = operator_norm(initial @ m - m, tol)
        if drift > 10.0 * tol.eq_tol * max(norm, 1.0):
            raise PairSpecError(
                f"support of {name} leaks out of the initial space of u: "
                f"||u*u {name} - {name}|| = {drift:.3e}"
            )


def synthesize_equality_pair(
    spec: PairSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Build (x, y) = (u a, u b) from a validated PairSpec.

    Because u*u fixes both a and b, |x| = a, |y| = b and |x+y| = a + b, so
    the pair satisfies the triangle equality by construction.
    """
    u = require_square(as_matrix(spec.u))
    a, b = as_matrix(spec.a), as_matrix(spec.b)
    require_same_shape(u, a)
    require_same_shape(u, b)
    _check_pair_spec(PairSpec(u, a, b), tol)
    return u @ a, u @ b


def make_pair_spec(n: int, rank_u: int, seed: int) -> PairSpec:
    """Seeded random PairSpec with a rank-rank_u partial isometry.

    u keeps the top rank_u singular triples of the polar factor of a Ginibre
    draw; a and b are Ginibre Gram matrices compressed by q = u*u, which
    forces their supports into the initial space of u.
    """
    if not 1 <= rank_u <= n:
        raise ValueError(f"rank_u must lie in [1, {n}], got {rank_u}")
    rng = np.random.default_rng(seed)
    g = ginibre(rng, n, n)
    dec = svd(g)
    u = dec.u[:, :rank_u] @ dec.v[:, :rank_u].conj().T
    q = u.conj().T @ u
    factors = []
    for _ in range(2):
        w = ginibre(rng, n, n)
        compressed = q @ (w.conj().T @ w) @ q
        factors.append(hermitian_part(compressed))
    return PairSpec(u, factors[0], factors[1])


def make_projection_counterexample(
    n: int, rank_p: int, rank_q: int
) -> tuple[np.ndarray, np.ndarray]:
    """Pair (P, -Q) with projections Q < P that violates the equality.

    |P + (-Q)| = P - Q while |P| + |-Q| = P + Q, so the defect is exactly
    2||Q|| = 2, and no partial isometry u can satisfy both u|P| = P and
    u|-Q| = -Q: on the range of Q the first forces <u e, e> = +1 and the
    second <u e, e> = -1.
    """
    if not (1 <= rank_q < rank_p <= n):
        raise ValueError(
            f"need 1 <= rank_q < rank_p <= n, got rank_q={rank_q}, "
            f"rank_p={rank_p}, n={n}"
        )
    p = np.zeros((n, n), dtype=np.complex128)
    q = np.zeros((n, n), dtype=np.complex128)
    for i in range(rank_p):
        p[i, i] = 1.0
    for i in range(rank_q):
        q[i, i] = 1.0
    return p, -q


def compute_contraction_factors(
    a, b, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the square roots of PSD a, b off the square root of a + b.

    Returns (k, l, p) with a^{1/2} = k (a+b)^{1/2}, b^{1/2} = l (a+b)^{1/2}
    realized through the pseudoinverse, and p the orthogonal projection onto
    ran(a+b).  Both k and l are contractions and k*k + l*l = p, from which
    k*k and l*l commute.
    """
    a, b = as_matrix(a), as_matrix(b)
    require_same_shape(a, b)
    require_square(a)
    sqrt_a = psd_sqrt(a, tol)
    sqrt_b = psd_sqrt(b, tol)
    total = hermitian_part(a + b)
    inv_root = pseudoinverse(psd_sqrt(total, tol), tol)
    k = sqrt_a @ inv_root
    l = sqrt_b @ inv_root
    eig = hermitian_eig(total, tol)
    norm = float(np.abs(eig.values).max(initial=0.0))
    keep = eig.values > tol.rank_tol * norm if norm > 0.0 else eig.values > 0.0
    basis = eig.vectors[:, keep]
    p = basis @ basis.conj().T
    return k, l, hermitian_part(p)


def common_isometry_least_squares(
    a, b, v, w, tol: ToleranceConfig = DEFAULT_TOL
) -> IsometryMergeResult:
    """Least-squares merge of two polar isometries into one candidate u.

    Solves u [a | b] = [v a | w b] in the least-squares sense via the
    pseudoinverse of the stacked matrix.  The map residual measures whether
    the defining relation is consistent, the isometry residual whether the
    solution obeys the partial-isometry law; both vanish together exactly
    when a(v*w - I)b = 0.
    """
    a, b, v, w = (as_matrix(m) for m in (a, b, v, w))
    require_same_shape(a, b)
    require_square(a)
    require_same_shape(v, w)
    require_same_shape(a, v)
    stacked = np.hstack([a, b])
    images = np.hstack([v @ a, w @ b])
    u = images @ pseudoinverse(stacked, tol)
    scale = max(operator_norm(a, tol), operator_norm(b, tol), 1.0)
    map_residual = operator_norm(u @ stacked - images, tol) / scale
    isometry_residual = operator_norm(u @ u.conj().T @ u - u, tol)
    return IsometryMergeResult(u, map_residual, isometry_residual)


def certify_proof_chain(
    x,
    y,
    tol: ToleranceConfig = DEFAULT_TOL,
    grid_size: int = 256,
) -> ProofCertificate:
    """Numerically verify every step connecting the equality to a common u.

    Requires triangle_defect(x, y).holds; otherwise raises
    EqualityPreconditionError rather than producing a failed certificate.
    Steps, each recorded with a residual and pass verdict:

      1. skew_cancellation   a(v*w - I)b + b(w*v - I)a = 0
      2. contraction_split   ||k||, ||l|| <= 1 and k*k + l*l = p
      3. product_positivity  (a+b)^{1/2} l*l k*k (a+b)^{1/2} is Hermitian PSD
      4. spectral_disk       numerical range of d(v*w - I)d lies in the
                             closed disk of radius ||d||^2 centered -||d||^2
      5. charpoly_cycle      the two cyclic orderings of the sandwiched
                             product share a characteristic polynomial
      6. cross_term_zero     a(v*w - I)b = 0
      7. common_isometry     the extracted u reproduces x and y

    Residuals of degree-2 expressions in (x, y) are normalized by scale^2,
    degree-1 ones by scale, with scale = max(||x||, ||y||, 1).
    """
    x, y = as_matrix(x), as_matrix(y)
    require_same_shape(x, y)
    require_square(x)
    report = triangle_defect(x, y, tol)
    if not report.holds:
        raise EqualityPreconditionError(report)
    scale = report.scale
    n = x.shape[0]

    polar_x = polar_decompose(x, tol)
    polar_y = polar_decompose(y, tol)
    a, v = polar_x.positive, polar_x.isometry
    b, w = polar_y.positive, polar_y.isometry
    k, l, p = compute_contraction_factors(a, b, tol)

    total = hermitian_part(a + b)
    root_total = psd_sqrt(total, tol)
    cross = v.conj().T @ w - np.eye(n, dtype=np.complex128)
    kk = k.conj().T @ k
    ll = l.conj().T @ l

    steps: list[StepResult] = []

    skew = a @ cross @ b
    residual = operator_norm(skew + skew.conj().T, tol) / scale**2
    steps.append(StepResult("skew_cancellation", residual, tol.eq_tol,
                            residual <= tol.eq_tol))

    norm_excess = max(operator_norm(k, tol) - 1.0, operator_norm(l, tol) - 1.0, 0.0)
    split = operator_norm(kk + ll - p, tol) / n
    residual = max(norm_excess, split)
    steps.append(StepResult("contraction_split", residual, tol.eq_tol,
                            residual <= tol.eq_tol))

    product = root_total @ ll @ kk @ root_total
    sym = hermitian_part(product)
    asym = operator_norm(product - sym, tol)
    min_eig = float(hermitian_eig(sym, tol).values[0])
    product_scale = max(operator_norm(total, tol), 1.0)
    residual = max(asym, -min_eig, 0.0) / product_scale
    steps.append(StepResult("product_positivity", residual, tol.eq_tol,
                            residual <= tol.eq_tol))

    d = psd_sqrt(sym, tol)
    d_norm = operator_norm(d, tol)
    disk = disk_containment_check(
        d @ cross @ d, -d_norm**2, d_norm**2, grid_size, tol
    )
    residual = disk.max_violation / max(d_norm**2, 1.0)
    steps.append(StepResult("spectral_disk", residual, tol.eq_tol, disk.passed))

    left = kk @ root_total
    right = cross @ root_total @ ll
    gap = char_poly_relative_gap(
        char_poly(left @ right, tol),
        char_poly(right @ left, tol),
        frobenius_norm(left) * frobenius_norm(right),
    )
    steps.append(StepResult("charpoly_cycle", gap, 1e-8, gap <= 1e-8))

    residual = operator_norm(a @ cross @ b, tol) / scale**2
    steps.append(StepResult("cross_term_zero", residual, tol.eq_tol,
                            residual <= tol.eq_tol))

    extraction = extract_common_isometry(x, y, tol)
    residual = max(extraction.residual_x, extraction.residual_y)
    steps.append(StepResult("common_isometry", residual, 10.0 * tol.eq_tol,
                            residual <= 10.0 * tol.eq_tol))

    return ProofCertificate(
        abs_x=a,
        abs_y=b,
        iso_x=v,
        iso_y=w,
        contraction_x=k,
        contraction_y=l,
        range_projection=p,
        product_root=d,
        steps=tuple(steps),
    )
