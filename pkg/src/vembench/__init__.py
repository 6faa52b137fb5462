"""vembench: mesh quality metrics vs. virtual element solver behaviour.

The package builds parametric families of degenerating polygons, meshes the
surrounding canvas with quality-controlled triangles, solves a Poisson
problem with a lowest-order virtual element method on the resulting
polygon/triangle meshes, and correlates geometric quality metrics with
solver accuracy and conditioning.
"""

from __future__ import annotations

__version__ = "0.1.0"
