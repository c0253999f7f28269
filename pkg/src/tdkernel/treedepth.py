"""Exact treedepth, decomposition certificates and c-treedepth modulators.

Treedepth of a connected graph is computed by the recursion
``td(G) = 1 + min_v td(G - v)`` (for disconnected graphs: the max over
components), memoized on vertex subsets and pruned by the best root found so
far. All searches run on bitmasks over the host graph's ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from tdkernel.errors import PreconditionError, ResourceLimitError
from tdkernel.graph import Graph, VertexSet, bits, lowest, mask_components, to_mask, vertex_set

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class TdDecomposition:
    """Rooted forest over a set of vertices of some host graph.

    ``parent[v]`` is ``None`` for roots. The forest may cover only part of the
    host graph (e.g. ``G - X`` for a modulator ``X``).
    """

    parent: dict[int, int | None]
    roots: tuple[int, ...]
    height: int

    @classmethod
    def from_parents(cls, parent: dict[int, int | None]) -> TdDecomposition:
        roots = tuple(sorted(v for v, p in parent.items() if p is None))
        return cls(dict(parent), roots, _forest_height(parent))

    @property
    def vertices(self) -> VertexSet:
        return tuple(sorted(self.parent))

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v: [] for v in self.parent}
        for v in sorted(self.parent):
            p = self.parent[v]
            if p is not None:
                out[p].append(v)
        return out

    def ancestors(self, v: int) -> list[int]:
        """Proper ancestors of ``v``, nearest first."""
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out


def _forest_height(parent: dict[int, int | None]) -> int:
    """Max number of vertices on a root-to-leaf path; -1 if not a forest."""
    depth: dict[int, int] = {}
    for v in parent:
        path = []
        u: int | None = v
        while u is not None and u not in depth:
            if u in path or u not in parent:
                return -1
            path.append(u)
            u = parent[u]
        base = 0 if u is None else depth[u]
        for w in reversed(path):
            base += 1
            depth[w] = base
    return max(depth.values(), default=0)


def _path_bound(masks, mask: int) -> int:
    """Treedepth lower bound from a greedily grown path: a path on ``L``
    vertices has treedepth ``ceil(log2(L + 1))``."""
    start = min(bits(mask), key=lambda v: (masks[v] & mask).bit_count())
    seen = 1 << start
    ends = [start, start]
    length = 1
    for side in (0, 1):
        v = ends[side]
        while True:
            cand = masks[v] & mask & ~seen
            if not cand:
                break
            # Warnsdorff: step to the neighbour with fewest onward options
            v = min(bits(cand), key=lambda u: (masks[u] & mask & ~seen).bit_count())
            seen |= 1 << v
            length += 1
    return max(2, length.bit_length())


class _TdSearch:
    """Memoized treedepth search over connected vertex subsets of one graph.

    ``solve(mask, ub)`` returns the exact treedepth of the connected subgraph
    induced by ``mask`` when it is smaller than ``ub``; otherwise it returns
    some value ``>= ub``. Exact results remember the chosen root, which is the
    smallest vertex id among optimal roots.
    """

    def __init__(self, g: Graph, node_budget: int = DEFAULT_NODE_BUDGET):
        self.masks = g.masks
        self.exact: dict[int, tuple[int, int]] = {}
        self.lower: dict[int, int] = {}
        self.nodes = 0
        self.node_budget = node_budget
        self._height = 0

    def solve(self, mask: int, ub: int) -> int:
        if mask & (mask - 1) == 0:
            return 1
        hit = self.exact.get(mask)
        if hit is not None:
            return hit[0]
        lb = self.lower.get(mask)
        if lb is None:
            lb = self.lower[mask] = _path_bound(self.masks, mask)
        if lb >= ub:
            return lb
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise ResourceLimitError(f"treedepth search exceeded {self.node_budget} nodes")
        masks = self.masks
        # high-degree vertices first: they tend to give small bounds early
        order = sorted(bits(mask), key=lambda v: -(masks[v] & mask).bit_count())
        best = ub
        for v in order:
            if self._fits(mask & ~(1 << v), best - 1):
                best = 1 + self._height
                if best == lb:
                    break
        if best < ub:
            for v in bits(mask):
                if self._fits(mask & ~(1 << v), best) and self._height + 1 == best:
                    self.exact[mask] = (best, v)
                    return best
            raise AssertionError("optimal root vanished")
        self.lower[mask] = ub
        return ub

    def _fits(self, rest: int, ub: int) -> bool:
        """Whether every component of ``rest`` has treedepth below ``ub``;
        on success the max treedepth is left in ``self._height``."""
        comps = mask_components(self.masks, rest)
        # biggest component first: it is the one most likely to fail the bound
        comps.sort(key=lambda c: -c.bit_count())
        worst = 0
        for comp in comps:
            r = self.solve(comp, ub)
            if r >= ub:
                return False
            worst = max(worst, r)
        self._height = worst
        return True

    def value(self, mask: int) -> int:
        """Exact treedepth of the (possibly disconnected) subgraph on ``mask``."""
        cap = mask.bit_count() + 1
        return max((self.solve(c, cap) for c in mask_components(self.masks, mask)), default=0)

    def at_most(self, mask: int, c: int) -> bool:
        """Whether the subgraph on ``mask`` has treedepth at most ``c``."""
        if c <= 0:
            return mask == 0
        return all(self.solve(comp, c + 1) <= c for comp in mask_components(self.masks, mask))

    def root(self, comp: int) -> int:
        """Root of the optimal decomposition of connected ``comp``."""
        if comp & (comp - 1) == 0:
            return lowest(comp)
        self.solve(comp, comp.bit_count() + 1)
        return self.exact[comp][1]

    def forest(self, mask: int) -> dict[int, int | None]:
        parent: dict[int, int | None] = {}
        stack: list[tuple[int, int | None]] = [(c, None) for c in mask_components(self.masks, mask)]
        while stack:
            comp, above = stack.pop()
            r = self.root(comp)
            parent[r] = above
            rest = comp & ~(1 << r)
            stack.extend((c, r) for c in mask_components(self.masks, rest))
        return parent


def td_exact(g: Graph, node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, TdDecomposition]:
    """Treedepth of ``g`` with an optimal decomposition certificate."""
    return td_of_subset(g, range(g.n), node_budget)


def td_of_subset(
    g: Graph, vertices: Iterable[int], node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple[int, TdDecomposition]:
    """Treedepth of ``g[vertices]``, decomposition keyed by ``g``'s ids."""
    mask = to_mask(vertex_set(vertices, g.n))
    search = _TdSearch(g, node_budget)
    value = search.value(mask)
    decomp = TdDecomposition.from_parents(search.forest(mask))
    assert decomp.height == value
    return value, decomp


def verify_decomposition(g: Graph, d: TdDecomposition, vertices: Iterable[int] | None = None) -> bool:
    """Check that ``d`` is a forest on ``vertices`` (default: all of ``g``)
    whose closure contains every edge of the induced subgraph, and that its
    reported height and roots are correct."""
    expected = set(range(g.n)) if vertices is None else set(vertices)
    if set(d.parent) != expected:
        return False
    if any(p is not None and p not in expected for p in d.parent.values()):
        return False
    height = _forest_height(d.parent)
    if height < 0 or height != d.height:
        return False
    if tuple(sorted(v for v, p in d.parent.items() if p is None)) != tuple(sorted(d.roots)):
        return False
    anc = {v: set(d.ancestors(v)) for v in expected}
    for u, v in g.edges:
        if u in expected and v in expected and u not in anc[v] and v not in anc[u]:
            return False
    return True


def is_c_modulator(g: Graph, x: Iterable[int], c: int, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Whether ``td(g - x) <= c``."""
    if c < 0:
        raise PreconditionError("c must be non-negative")
    rest = g.full_mask() & ~to_mask(vertex_set(x, g.n))
    return _TdSearch(g, node_budget).at_most(rest, c)


@dataclass(frozen=True)
class Modulator:
    x: VertexSet
    c: int
    mode: str
    decomposition: TdDecomposition = field(compare=False)


def compute_modulator(
    g: Graph, c: int, mode: str = "exact", node_budget: int = DEFAULT_NODE_BUDGET
) -> Modulator:
    """A set ``X`` with ``td(g - X) <= c``.

    ``exact`` returns a minimum one by iterative deepening over the vertices
    of an obstruction (a component of treedepth > c, which any modulator must
    hit). ``greedy`` repeatedly moves the optimal root of the first violating
    component into ``X``.
    """
    if c < 1:
        raise PreconditionError("c must be at least 1")
    search = _TdSearch(g, node_budget)
    full = g.full_mask()

    def obstruction(removed: int) -> int:
        for comp in mask_components(search.masks, full & ~removed):
            if search.solve(comp, c + 1) > c:
                return comp
        return 0

    if mode == "greedy":
        removed = 0
        while comp := obstruction(removed):
            removed |= 1 << search.root(comp)
    elif mode == "exact":
        removed = _exact_modulator(search, obstruction, node_budget)
    else:
        raise PreconditionError(f"unknown modulator mode {mode!r}")
    decomp = TdDecomposition.from_parents(search.forest(full & ~removed))
    return Modulator(tuple(bits(removed)), c, mode, decomp)


def _exact_modulator(search: _TdSearch, obstruction, node_budget: int) -> int:
    failed: set[tuple[int, int]] = set()
    steps = 0

    def dfs(removed: int, left: int) -> int | None:
        nonlocal steps
        comp = obstruction(removed)
        if not comp:
            return removed
        if left == 0 or (removed, left) in failed:
            return None
        steps += 1
        if steps > node_budget:
            raise ResourceLimitError(f"modulator search exceeded {node_budget} nodes")
        for v in bits(comp):
            found = dfs(removed | (1 << v), left - 1)
            if found is not None:
                return found
        failed.add((removed, left))
        return None

    size = 0
    while True:
        found = dfs(0, size)
        if found is not None:
            return found
        size += 1
