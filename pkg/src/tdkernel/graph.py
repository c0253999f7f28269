"""Simple undirected graphs on dense integer ids, plus the handful of
structural operations the rest of the package is built on.

Vertex sets are plain sorted tuples of ints. Most hot loops work on Python
int bitmasks (bit ``v`` set iff vertex ``v`` is present); the helpers at the
bottom of this module convert between the two views.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from tdkernel.errors import InvariantError

Edge = tuple[int, int]
VertexSet = tuple[int, ...]


def vertex_set(vertices: Iterable[int], n: int | None = None) -> VertexSet:
    """Sort and deduplicate ``vertices``; if ``n`` is given, check ids."""
    vs = tuple(sorted(set(vertices)))
    if n is not None and vs and (vs[0] < 0 or vs[-1] >= n):
        bad = [v for v in vs if not 0 <= v < n]
        raise InvariantError(f"invalid vertex id(s) {bad} for a graph on {n} vertices")
    return vs


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Edges are canonical ``(min, max)`` pairs kept in sorted order. Self-loops,
    out-of-range endpoints and repeated edges raise :class:`InvariantError`.
    ``labels`` optionally tags each vertex with a provenance string.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvariantError("vertex count must be non-negative")
        canon = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvariantError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvariantError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            canon.append((u, v) if u < v else (v, u))
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise InvariantError(f"parallel edge {a}")
        object.__setattr__(self, "edges", tuple(canon))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.n:
                raise InvariantError("labels must have one entry per vertex")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None, dedupe: bool = False) -> Graph:
        """Build a graph, optionally collapsing repeated edges instead of raising."""
        es = [(min(u, v), max(u, v)) for u, v in edges]
        if dedupe:
            es = sorted(set(es))
        return cls(n, tuple(es), labels)

    @classmethod
    def empty(cls, n: int = 0) -> Graph:
        return cls(n)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Open-neighborhood bitmask of every vertex."""
        out = [0] * self.n
        for u, v in self.edges:
            out[u] |= 1 << v
            out[v] |= 1 << u
        return tuple(out)

    @cached_property
    def _edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# -- bitmask helpers ---------------------------------------------------------

def bits(mask: int) -> Iterable[int]:
    """Yield set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def mask_components(masks: Sequence[int], mask: int) -> list[int]:
    """Connected components of the subgraph induced by ``mask``, as bitmasks,
    ordered by smallest member."""
    comps = []
    rest = mask
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= masks[v]
            nxt &= rest & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rest &= ~comp
    return comps


# -- operations --------------------------------------------------------------

def components(g: Graph) -> list[VertexSet]:
    """Partition of the vertex ids into connected components, sorted by
    smallest member."""
    return [tuple(bits(c)) for c in mask_components(g.masks, g.full_mask())]


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by ``s`` with vertices renumbered densely in the order
    of ``s``. Returns the graph and the old->new id table."""
    vs = vertex_set(s, g.n)
    remap = {v: i for i, v in enumerate(vs)}
    edges = [(remap[u], remap[v]) for u, v in g.edges if u in remap and v in remap]
    labels = None if g.labels is None else tuple(g.labels[v] for v in vs)
    return Graph(len(vs), tuple(edges), labels), remap


def degeneracy(g: Graph) -> tuple[int, list[int]]:
    """Degeneracy and a witnessing elimination order.

    Repeatedly removes a vertex of minimum remaining degree (smallest id on
    ties). Every vertex has at most ``d`` neighbours later in the order.
    """
    deg = [g.degree(v) for v in range(g.n)]
    removed = [False] * g.n
    order: list[int] = []
    d = 0
    for _ in range(g.n):
        best = -1
        for v in range(g.n):
            if not removed[v] and (best < 0 or deg[v] < deg[best]):
                best = v
        d = max(d, deg[best])
        removed[best] = True
        order.append(best)
        for u in g.adj[best]:
            if not removed[u]:
                deg[u] -= 1
    return d, order


def elimination_width(g: Graph, order: Sequence[int]) -> int:
    """Largest number of later neighbours any vertex has along ``order``."""
    if sorted(order) != list(range(g.n)):
        raise InvariantError("order must be a permutation of the vertex ids")
    pos = {v: i for i, v in enumerate(order)}
    width = 0
    for v in order:
        later = sum(1 for u in g.adj[v] if pos[u] > pos[v])
        width = max(width, later)
    return width


def disjoint_union(gs: Sequence[Graph]) -> tuple[Graph, list[int]]:
    """Disjoint union of ``gs``; input ``i`` occupies ids starting at
    ``offsets[i]``."""
    offsets = []
    edges: list[Edge] = []
    labels: list[str] | None = [] if gs and all(g.labels is not None for g in gs) else None
    total = 0
    for g in gs:
        offsets.append(total)
        edges.extend((u + total, v + total) for u, v in g.edges)
        if labels is not None:
            labels.extend(g.labels)
        total += g.n
    return Graph(total, tuple(edges), None if labels is None else tuple(labels)), offsets


def is_independent(g: Graph, s: Iterable[int]) -> bool:
    """True iff ``s`` is an independent set of ``g``."""
    sm = to_mask(s)
    return all(not (g.masks[v] & sm) for v in bits(sm))

