"""Cayley-ball development, cone types, geodesic automata and exact curvature
audits for k-fold triangle groups presented by finite vertex-group tables."""

__version__ = "0.1.0"

from .groups import (
    FiniteGroup,
    TriangleGroupSpec,
    GroupError,
    load_group,
    load_triangle_spec,
    load_triangle_spec_file,
    build_coset_graph,
    half_girth,
    local_link,
    npc_check,
)
from .samples import load_sample, sample_names

__all__ = [
    "FiniteGroup",
    "TriangleGroupSpec",
    "GroupError",
    "load_group",
    "load_triangle_spec",
    "load_triangle_spec_file",
    "build_coset_graph",
    "half_girth",
    "local_link",
    "npc_check",
    "load_sample",
    "sample_names",
    "__version__",
]
