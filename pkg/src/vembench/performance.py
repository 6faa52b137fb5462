"""Solver accuracy metrics, conditioning, and convergence-rate fitting.

Three relative error measures (vertex max, projected L2, energy), the
1-norm condition number of the reduced system, and a log-log regression
that recovers the constant and rate of an error-vs-meshsize power law.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import (
    InvalidSamples,
    NegativeQuadraticForm,
    SolveFailed,
    ZeroNormalizer,
)
from .geometry import Polygon2, centroid, diameter, integrate_over_polygon
from .meshing import PolygonMesh, mesh_size
from .vem import LinearSystem, ModelProblem, local_operators

NORMALIZER_FLOOR = 1e-300
EXACT_INVERSE_LIMIT = 20000
_INVERSE_BLOCK = 128

Field = Callable[[float, float], float]


class SolverReport(NamedTuple):
    eps_inf: float
    eps_2: float
    eps_S: float
    kappa1: float
    h: float
    n_dofs: int


class ConvergenceFit(NamedTuple):
    """Power-law fit error = C * h**p; residual is the largest absolute
    log-space deviation of the samples from the fitted line."""

    C: float
    p: float
    residual: float


def _vertex_values(u: Field, mesh: PolygonMesh) -> np.ndarray:
    return np.array([u(v.x, v.y) for v in mesh.vertices])


def error_linf(u: Field, u_h: np.ndarray, mesh: PolygonMesh) -> float:
    """Largest vertex error relative to the largest exact vertex value."""
    exact = _vertex_values(u, mesh)
    scale = np.abs(exact).max()
    if scale < NORMALIZER_FLOOR:
        raise ZeroNormalizer("exact solution vanishes at every vertex")
    return np.abs(exact - np.asarray(u_h)).max() / scale


def error_l2(u: Field, u_h: np.ndarray, mesh: PolygonMesh) -> float:
    """Relative L2 distance between u and the elementwise affine
    projection of the discrete solution.

    The discrete function itself is never evaluated off the vertices;
    each element contributes the integral of (u - affine)^2, with the
    affine part rebuilt from the element's projection coefficients.
    """
    u_h = np.asarray(u_h)
    num = 0.0
    den = 0.0
    for cell in mesh.cells:
        poly = Polygon2([mesh.vertices[i] for i in cell])
        ops = local_operators(poly)
        c0, c1, c2 = ops.coefficient_map @ u_h[list(cell)]
        xc, yc = centroid(poly)
        h = diameter(poly)

        def diff_sq(x: float, y: float) -> float:
            affine = c0 + c1 * (x - xc) / h + c2 * (y - yc) / h
            return (u(x, y) - affine) ** 2

        num += integrate_over_polygon(diff_sq, poly)
        den += integrate_over_polygon(lambda x, y: u(x, y) ** 2, poly)
    if den < NORMALIZER_FLOOR:
        raise ZeroNormalizer("exact solution has vanishing L2 mass")
    return math.sqrt(num / den)


def _quadratic_form(matrix: sp.spmatrix, v: np.ndarray, scale: float) -> float:
    value = float(v @ (matrix @ v))
    if value < -1e-10 * scale * float(v @ v):
        raise NegativeQuadraticForm(
            f"stiffness quadratic form is {value:.3e}; assembly is broken"
        )
    return max(value, 0.0)


def error_energy(
    u: Field, u_h: np.ndarray, system: LinearSystem, mesh: PolygonMesh
) -> float:
    """Energy-norm error sqrt(e S e) / sqrt(u S u) on the raw stiffness.

    Uses the matrix before boundary elimination, whose kernel is exactly
    the constants, so constant offsets in the error cost nothing.
    """
    exact = _vertex_values(u, mesh)
    e = exact - np.asarray(u_h)
    raw = system.raw_matrix
    scale = math.sqrt((raw.multiply(raw)).sum())
    num = _quadratic_form(raw, e, scale)
    den = _quadratic_form(raw, exact, scale)
    if den < NORMALIZER_FLOOR:
        raise ZeroNormalizer("exact solution has vanishing energy")
    return math.sqrt(num / den)


def condition_number_l1(
    system: LinearSystem, exact_limit: int = EXACT_INVERSE_LIMIT
) -> float:
    """1-norm condition number of the free-dof block of the system.

    The inverse norm is exact (factorize, solve against every identity
    column) up to exact_limit unknowns and a Hager-Higham estimate
    beyond. A system with no free dofs reports 1.0, the conditioning of
    the remaining identity.
    """
    free = ~system.boundary_mask
    if not free.any():
        return 1.0
    reduced = sp.csc_matrix(system.matrix[free][:, free])
    n = reduced.shape[0]
    norm = np.abs(reduced).sum(axis=0).max()
    try:
        lu = spla.splu(reduced)
    except RuntimeError as exc:
        raise SolveFailed(f"free-dof factorization failed: {exc}") from exc
    if n <= exact_limit:
        inv_norm = 0.0
        for start in range(0, n, _INVERSE_BLOCK):
            block = np.zeros((n, min(_INVERSE_BLOCK, n - start)))
            for k in range(block.shape[1]):
                block[start + k, k] = 1.0
            cols = lu.solve(block)
            inv_norm = max(inv_norm, np.abs(cols).sum(axis=0).max())
    else:
        op = spla.LinearOperator(
            (n, n),
            matvec=lu.solve,
            rmatvec=lambda b: lu.solve(b, trans="T"),
        )
        inv_norm = spla.onenormest(op)
    kappa = float(norm * inv_norm)
    if not math.isfinite(kappa):
        raise SolveFailed("condition number overflowed; system near-singular")
    return kappa


def fit_convergence(samples: Sequence[tuple[float, float]]) -> ConvergenceFit:
    """Least-squares power law through (h, error) pairs in log-log space."""
    if len(samples) < 2:
        raise InvalidSamples("need at least two (h, error) samples")
    hs = np.array([s[0] for s in samples], dtype=float)
    errs = np.array([s[1] for s in samples], dtype=float)
    if not (np.all(np.isfinite(hs)) and np.all(np.isfinite(errs))):
        raise InvalidSamples("samples must be finite")
    if np.any(hs <= 0.0) or np.any(errs <= 0.0):
        raise InvalidSamples("samples must be strictly positive")
    if len(set(hs.tolist())) != len(hs):
        raise InvalidSamples("duplicate mesh sizes make the fit ill-posed")
    # canonical coarse-to-fine order makes the fit independent of how the
    # caller collected the samples, down to the last bit
    order = np.argsort(-hs)
    hs, errs = hs[order], errs[order]
    lh = np.log(hs)
    le = np.log(errs)
    slope, intercept = np.polyfit(lh, le, 1)
    residual = float(np.abs(le - (intercept + slope * lh)).max())
    return ConvergenceFit(C=float(np.exp(intercept)), p=float(slope), residual=residual)


def solver_report(
    mesh: PolygonMesh,
    system: LinearSystem,
    u_h: np.ndarray,
    problem: ModelProblem,
) -> SolverReport:
    """All solve metrics for one mesh, packaged for the benchmark tables."""
    u = problem.exact_solution
    return SolverReport(
        eps_inf=error_linf(u, u_h, mesh),
        eps_2=error_l2(u, u_h, mesh),
        eps_S=error_energy(u, u_h, system, mesh),
        kappa1=condition_number_l1(system),
        h=mesh_size(mesh),
        n_dofs=len(mesh.vertices),
    )
