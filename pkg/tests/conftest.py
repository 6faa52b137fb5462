"""Session fixtures for the expensive shared datasets.

Built lazily on first use and reused across test modules; wall-clock
build time rides along so the budgeted suites can charge it honestly.
"""

from __future__ import annotations

import time
from types import SimpleNamespace

import pytest

from vembench.families import FamilyId, PolygonSpec, make_polygon
from vembench.meshing import build_canvas_mesh, build_hierarchy, mesh_size
from vembench.performance import error_l2
from vembench.vem import assemble, sinsin_problem, solve


@pytest.fixture(scope="session")
def triangle_reference_samples():
    """Five mirror levels of the all-triangle canvas mesh, solved for sinsin."""
    start = time.perf_counter()
    problem = sinsin_problem()
    base = build_canvas_mesh(make_polygon(PolygonSpec(FamilyId.NSIDED, 0.0)))
    hierarchy = build_hierarchy(base, 5)
    samples = []
    for mesh in hierarchy.levels:
        u = solve(assemble(mesh, problem))
        samples.append((mesh_size(mesh), error_l2(problem.exact_solution, u, mesh)))
    return SimpleNamespace(
        hierarchy=hierarchy,
        samples=samples,
        build_seconds=time.perf_counter() - start,
    )
