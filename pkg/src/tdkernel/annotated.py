"""Annotated instances: a graph on ``X + R`` whose forbidden sets inside the
modulator ``X`` are hyperedges, plus the exact solver and conflict values
defined on them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from tdkernel.errors import InvariantError, PreconditionError
from tdkernel.graph import Graph, VertexSet, bits, mask_components, to_mask, vertex_set
from tdkernel.solvers import WeightedMIS
from tdkernel.treedepth import _TdSearch


@dataclass(frozen=True)
class AnnotatedInstance:
    """``(G, X, H, k, c)``.

    Plain edges of ``g`` have at most one endpoint in ``x``; adjacency inside
    ``x`` is expressed only through ``hyperedges``. ``origin[v]`` is the id
    vertex ``v`` had in the instance a kernelization run started from, so
    traces stay readable across renumbering.
    """

    g: Graph
    x: VertexSet
    hyperedges: tuple[VertexSet, ...] = ()
    k: int = 0
    c: int = 0
    origin: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        n = self.g.n
        x = vertex_set(self.x, n)
        hs = set()
        for h in self.hyperedges:
            hv = vertex_set(h, n)
            if not hv:
                raise InvariantError("hyperedges must be nonempty")
            hs.add(hv)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "hyperedges", tuple(sorted(hs)))
        if self.origin is None:
            object.__setattr__(self, "origin", tuple(range(n)))
        elif len(self.origin) != n:
            raise InvariantError("origin must have one entry per vertex")
        xm = self.x_mask
        for u, v in self.g.edges:
            if (xm >> u) & 1 and (xm >> v) & 1:
                raise InvariantError(f"plain edge ({u}, {v}) lies inside X; it must be a hyperedge")
        for h in self.hyperedges:
            if to_mask(h) & ~xm:
                raise InvariantError(f"hyperedge {h} is not contained in X")
        if self.c < 0:
            raise InvariantError("level c must be non-negative")

    @classmethod
    def from_graph(cls, g: Graph, x: Iterable[int], k: int, c: int) -> AnnotatedInstance:
        """Wrap a plain instance: edges inside ``x`` become size-2 hyperedges."""
        xs = vertex_set(x, g.n)
        xm = to_mask(xs)
        plain, hyper = [], []
        for u, v in g.edges:
            if (xm >> u) & 1 and (xm >> v) & 1:
                hyper.append((u, v))
            else:
                plain.append((u, v))
        return cls(Graph(g.n, tuple(plain), g.labels), xs, tuple(hyper), k, c)

    # -- views ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.g.n

    @property
    def x_mask(self) -> int:
        return to_mask(self.x)

    @property
    def r_mask(self) -> int:
        return self.g.full_mask() & ~self.x_mask

    @property
    def r(self) -> VertexSet:
        return tuple(bits(self.r_mask))

    @property
    def hyperedge_masks(self) -> list[int]:
        return [to_mask(h) for h in self.hyperedges]

    def r_components(self) -> list[int]:
        """Components of ``G[R]`` as bitmasks, by smallest member."""
        return mask_components(self.g.masks, self.r_mask)

    def neighborhood_in(self, xprime: int, rprime: int) -> int:
        """``N_{R'}(X')`` as a bitmask."""
        out = 0
        for v in bits(xprime):
            out |= self.g.masks[v]
        return out & rprime

    def hyperedge_total(self) -> int:
        return sum(len(h) for h in self.hyperedges)

    # -- checks and edits ----------------------------------------------------

    def validate(self) -> None:
        """Raise :class:`InvariantError` unless ``td(G[R]) <= c``. (The
        structural invariants are enforced at construction.)"""
        if not _TdSearch(self.g).at_most(self.r_mask, self.c):
            raise InvariantError(f"G[R] has treedepth above c={self.c}")

    def without(self, mask: int) -> AnnotatedInstance:
        """Delete the vertices in ``mask`` and every hyperedge touching them;
        survivors are renumbered densely in increasing order."""
        keep = [v for v in range(self.n) if not (mask >> v) & 1]
        remap = {v: i for i, v in enumerate(keep)}
        edges = tuple((remap[u], remap[v]) for u, v in self.g.edges if u in remap and v in remap)
        labels = None if self.g.labels is None else tuple(self.g.labels[v] for v in keep)
        hyper = tuple(
            tuple(remap[v] for v in h) for h in self.hyperedges if all(v in remap for v in h)
        )
        return AnnotatedInstance(
            Graph(len(keep), edges, labels),
            tuple(remap[v] for v in self.x if v in remap),
            hyper,
            self.k,
            self.c,
            tuple(self.origin[v] for v in keep),
        )

    def with_k(self, k: int) -> AnnotatedInstance:
        return replace(self, k=k)

    def origin_ids(self, mask: int) -> list[int]:
        return [self.origin[v] for v in bits(mask)]


def independent_subsets(
    xs: VertexSet, hyper: list[int], max_size: int | None = None
) -> Iterator[int]:
    """Nonempty subsets of ``xs`` containing no hyperedge (given as masks),
    of size at most ``max_size``, as bitmasks in lexicographic order of their
    sorted member tuples."""
    limit = len(xs) if max_size is None else max_size

    def rec(start: int, current: int, size: int) -> Iterator[int]:
        for i in range(start, len(xs)):
            nxt = current | (1 << xs[i])
            if any(h & nxt == h for h in hyper):
                continue
            yield nxt
            if size + 1 < limit:
                yield from rec(i + 1, nxt, size + 1)

    if limit <= 0:
        return iter(())
    return rec(0, 0, 0)


def alpha_annotated(inst: AnnotatedInstance) -> tuple[int, VertexSet]:
    """Largest ``S`` containing no plain edge and no hyperedge entirely.

    Enumerates the hyperedge-free subsets of ``X`` and completes each with a
    maximum independent set of ``R - N(S cap X)``.
    """
    solver = WeightedMIS(inst.g.masks)
    rm = inst.r_mask
    best, arg = solver.solve(rm)
    hyper = inst.hyperedge_masks
    for sx in independent_subsets(inst.x, hyper):
        w, s = solver.solve(rm & ~inst.neighborhood_in(sx, rm))
        w += sx.bit_count()
        if w > best:
            best, arg = w, s | sx
    return best, tuple(bits(arg))


def conf_chunk(inst: AnnotatedInstance, rprime: Iterable[int], xprime: Iterable[int]) -> int:
    """``alpha(R') - alpha(R' - N_{R'}(X'))``."""
    rm = to_mask(vertex_set(rprime, inst.n))
    xm = to_mask(vertex_set(xprime, inst.n))
    if rm & inst.x_mask:
        raise PreconditionError("R' must lie outside X")
    if xm & ~inst.x_mask:
        raise PreconditionError("X' must lie inside X")
    solver = WeightedMIS(inst.g.masks)
    return solver.solve(rm)[0] - solver.solve(rm & ~inst.neighborhood_in(xm, rm))[0]
