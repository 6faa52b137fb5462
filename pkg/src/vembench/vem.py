"""Lowest-order virtual elements for the Poisson problem on polygon meshes.

Per element the method needs three small matrices built from vertex data
alone: the monomial values at the dofs, the boundary functionals that
integrate each basis function against monomial normal derivatives, and
their product.  Together they give the energy projection onto linear
polynomials; the local stiffness is the projected gradient term plus an
identity stabilization on the projection complement.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import SingularG, SolveFailed, VembenchError
from .geometry import Polygon2, centroid, diameter, signed_area

GRAM_CONDITION_LIMIT = 1e14


class ElementOperators(NamedTuple):
    """Projection machinery for one polygon element.

    dof_matrix is n x 3: scaled monomials {1, (x-xc)/h, (y-yc)/h} sampled
    at the vertices.  functionals is 3 x n; its first row is the vertex
    average (pinning the projector's constant part) and the gradient rows
    integrate each hat function against the monomial normal derivative,
    exactly, via the edge trapezoid rule.  coefficient_map sends a dof
    vector to monomial coefficients; projection = dof_matrix @
    coefficient_map maps dofs to the dofs of the projected linear.
    """

    polygon: Polygon2
    dof_matrix: np.ndarray
    functionals: np.ndarray
    gram: np.ndarray
    coefficient_map: np.ndarray
    projection: np.ndarray


class ModelProblem(NamedTuple):
    exact_solution: Callable[[float, float], float]
    load: Callable[[float, float], float]
    dirichlet_data: Callable[[float, float], float]


class LinearSystem(NamedTuple):
    """Assembled global system; dof index equals mesh vertex index.

    raw_matrix keeps the stiffness before boundary conditions (its kernel
    is the constant vector); matrix and rhs have Dirichlet rows and
    columns eliminated symmetrically, with unit diagonal rows holding the
    prescribed values.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    raw_matrix: sp.csr_matrix
    boundary_mask: np.ndarray
    boundary_values: np.ndarray


def sinsin_problem() -> ModelProblem:
    """Product-of-sines benchmark: -laplace(u) = f with u = 0 on the square."""
    scale = 1.0 / (2.0 * math.pi**2)

    def u(x: float, y: float) -> float:
        return math.sin(math.pi * x) * math.sin(math.pi * y) * scale

    def f(x: float, y: float) -> float:
        return math.sin(math.pi * x) * math.sin(math.pi * y)

    def g(x: float, y: float) -> float:
        return 0.0

    return ModelProblem(u, f, g)


def patch_problem() -> ModelProblem:
    """Linear field u = 1 + 2x + 3y: any consistent scheme solves it exactly."""

    def u(x: float, y: float) -> float:
        return 1.0 + 2.0 * x + 3.0 * y

    def f(x: float, y: float) -> float:
        return 0.0

    return ModelProblem(u, f, u)


PROBLEMS: dict[str, Callable[[], ModelProblem]] = {
    "sinsin": sinsin_problem,
    "patch": patch_problem,
}


def local_operators(p: Polygon2) -> ElementOperators:
    """Build the element projection matrices for p.

    Raises SingularG when the 3x3 system relating functionals to
    coefficients is numerically singular (condition above 1e14), which
    flags a degenerate element rather than a solver hiccup.
    """
    verts = p.vertices
    n = len(verts)
    xc, yc = centroid(p)
    h = diameter(p)
    xs = np.array([v.x for v in verts])
    ys = np.array([v.y for v in verts])

    dof_matrix = np.column_stack(
        [np.ones(n), (xs - xc) / h, (ys - yc) / h]
    )

    functionals = np.empty((3, n))
    functionals[0] = 1.0 / n
    # hat functions are linear on each edge and the monomial normal
    # derivative is constant there, so the trapezoid rule is exact: each
    # vertex collects half of both incident edge normals
    nxt = np.roll(np.arange(n), -1)
    prv = np.roll(np.arange(n), 1)
    functionals[1] = (ys[nxt] - ys[prv]) / (2.0 * h)
    functionals[2] = -(xs[nxt] - xs[prv]) / (2.0 * h)

    gram = functionals @ dof_matrix
    if np.linalg.cond(gram) > GRAM_CONDITION_LIMIT:
        raise SingularG(f"element projection system is singular (n={n})")
    coefficient_map = np.linalg.solve(gram, functionals)
    projection = dof_matrix @ coefficient_map
    return ElementOperators(
        p, dof_matrix, functionals, gram, coefficient_map, projection
    )


def local_stiffness(p: Polygon2, trace_scaled: bool = False) -> np.ndarray:
    """Stabilized local stiffness matrix.

    The gradient part of the projection carries the consistency term; the
    remainder is stabilized with the plain euclidean dof product.  With
    trace_scaled the stabilization is multiplied by half the consistency
    trace, an alternative scaling kept switchable but off by default.
    """
    ops = local_operators(p)
    grad_gram = ops.gram.copy()
    grad_gram[0, :] = 0.0
    grad_gram[:, 0] = 0.0
    consistency = ops.coefficient_map.T @ grad_gram @ ops.coefficient_map
    complement = np.eye(len(p)) - ops.projection
    factor = 0.5 * np.trace(consistency) if trace_scaled else 1.0
    return consistency + factor * (complement.T @ complement)


def assemble(mesh, problem: ModelProblem, trace_scaled: bool = False) -> LinearSystem:
    """Assemble the global system for a PolygonMesh.

    The element load is the one-point rule |K| f(centroid) spread evenly
    over the element's vertex dofs.  Dirichlet values come from the
    problem's boundary data at flagged vertices.
    """
    ndof = len(mesh.vertices)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    rhs = np.zeros(ndof)
    for cell_id, cell in enumerate(mesh.cells):
        try:
            poly = Polygon2([mesh.vertices[i] for i in cell])
            k_local = local_stiffness(poly, trace_scaled=trace_scaled)
        except VembenchError as exc:
            raise type(exc)(f"cell {cell_id}: {exc}") from exc
        for a, i in enumerate(cell):
            for b, j in enumerate(cell):
                rows.append(i)
                cols.append(j)
                vals.append(k_local[a, b])
        xc, yc = centroid(poly)
        share = signed_area(poly) * problem.load(xc, yc) / len(cell)
        for i in cell:
            rhs[i] += share
    raw = sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(ndof, ndof))
    )

    mask = np.array(mesh.boundary_vertex_flags, dtype=bool)
    values = np.zeros(ndof)
    for i in np.nonzero(mask)[0]:
        v = mesh.vertices[i]
        values[i] = problem.dirichlet_data(v.x, v.y)

    # symmetric elimination: move prescribed values to the rhs, then keep
    # unit rows/columns so the matrix stays square and symmetric
    lifted = np.where(mask, values, 0.0)
    rhs = rhs - raw @ lifted
    rhs[mask] = values[mask]
    free = sp.diags(np.where(mask, 0.0, 1.0))
    pinned = sp.diags(mask.astype(float))
    matrix = sp.csr_matrix(free @ raw @ free + pinned)
    return LinearSystem(matrix, rhs, raw, mask, values)


def solve(system: LinearSystem) -> np.ndarray:
    """Direct sparse solve with a residual check."""
    try:
        solution = spla.spsolve(system.matrix.tocsc(), system.rhs)
    except Exception as exc:
        raise SolveFailed(f"sparse factorization failed: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise SolveFailed("factorization produced non-finite values")
    residual = np.linalg.norm(system.matrix @ solution - system.rhs)
    limit = 1e-10 * np.linalg.norm(system.rhs)
    if residual > limit:
        raise SolveFailed(
            f"residual {residual:.3e} above {limit:.3e}; system near-singular"
        )
    return solution


