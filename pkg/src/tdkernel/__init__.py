"""Kernelization toolkit for Independent Set / Vertex Cover parameterized by a
c-treedepth modulator, plus verifiable hardness-side instance generators."""

from tdkernel.errors import InvariantError, PreconditionError, ResourceLimitError
from tdkernel.graph import Graph, components, degeneracy, disjoint_union, induced_subgraph

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "InvariantError",
    "PreconditionError",
    "ResourceLimitError",
    "components",
    "degeneracy",
    "disjoint_union",
    "induced_subgraph",
]
