"""Instance generators for the hardness side: subdivisions, the Vertex Cover
to Dominating Set reductions, the OR-composition from 3-SAT, the
conflict-lower-bound family, disjoint-union composition and the grid+apex
construction. Every generator attaches certificates that
:func:`verify_certificates` can check against the produced graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from tdkernel.errors import PreconditionError
from tdkernel.graph import Graph, VertexSet, components, disjoint_union, elimination_width, induced_subgraph, vertex_set
from tdkernel.solvers import CnfFormula, vertex_cover_number
from tdkernel.treedepth import is_c_modulator, td_exact


@dataclass(frozen=True)
class LabeledInstance:
    """A graph with a budget and named certificates.

    ``certificates`` maps a name to a vertex tuple. Two names are checked by
    :func:`verify_certificates` when the matching entry of ``bounds`` is
    present: ``modulator`` (``td(g - X) <= bounds["modulator"]``) and
    ``elimination_order`` (at most ``bounds["elimination_order"]`` later
    neighbours per vertex). Other names are role annotations.
    """

    g: Graph
    k: int
    certificates: dict[str, tuple[int, ...]] = field(default_factory=dict)
    bounds: dict[str, int] = field(default_factory=dict)
    c: int = 0

    @property
    def modulator(self) -> VertexSet:
        return self.certificates.get("modulator", ())


def verify_certificates(inst: LabeledInstance) -> dict[str, bool]:
    out = {}
    if "modulator" in inst.bounds and "modulator" in inst.certificates:
        out["modulator"] = is_c_modulator(inst.g, inst.certificates["modulator"], inst.bounds["modulator"])
    if "elimination_order" in inst.bounds and "elimination_order" in inst.certificates:
        order = inst.certificates["elimination_order"]
        out["elimination_order"] = (
            sorted(order) == list(range(inst.g.n))
            and elimination_width(inst.g, order) <= inst.bounds["elimination_order"]
        )
    return out


# -- subdivisions ------------------------------------------------------------

def subdivide(g: Graph, t: int) -> Graph:
    """Replace every edge by a path through ``t`` new vertices.

    Original vertices keep their ids; the new vertices of edge ``(u, v)``
    (in sorted edge order) follow, listed from the ``u`` end.
    """
    if t < 0:
        raise PreconditionError("t must be non-negative")
    if t == 0:
        return g
    labels = [g.label(v) for v in range(g.n)]
    edges = []
    nxt = g.n
    for u, v in g.edges:
        path = [u] + list(range(nxt, nxt + t)) + [v]
        labels += [f"s:{u}-{v}:{i + 1}" for i in range(t)]
        nxt += t
        edges += list(zip(path, path[1:]))
    return Graph(nxt, tuple(edges), tuple(labels))


def ds_subdivision_instance(g: Graph, k: int, c: int) -> LabeledInstance:
    """``(G^{3c-sub}, k + m*c)``: same Dominating Set answer as ``(g, k)``."""
    if c < 0:
        raise PreconditionError("c must be non-negative")
    return LabeledInstance(subdivide(g, 3 * c), k + g.m * c)


def reduce_vc_ds_deg2(g: Graph, k: int, cover: Iterable[int] | None = None) -> LabeledInstance:
    """Dominating Set on ``g`` to Dominating Set on the 2-degenerate graph
    ``G^{3-sub}`` with budget ``k + m``; a vertex cover of ``g`` is a
    3-treedepth modulator of the result."""
    if cover is None:
        cover = vertex_cover_number(g)[1]
    cover = vertex_set(cover, g.n)
    cs = set(cover)
    if any(u not in cs and v not in cs for u, v in g.edges):
        raise PreconditionError("the given set is not a vertex cover")
    h = subdivide(g, 3)
    order = tuple(range(g.n, h.n)) + tuple(range(g.n))
    return LabeledInstance(
        h,
        k + g.m,
        {"modulator": cover, "elimination_order": order},
        {"modulator": 3, "elimination_order": 2},
        c=3,
    )


def edge_gadget_vc_to_ds(g: Graph, k: int) -> LabeledInstance:
    """Vertex Cover to Dominating Set: one new vertex per edge, adjacent to
    both endpoints; budget unchanged. Isolated vertices would have to
    dominate themselves, so they are rejected."""
    isolated = [v for v in range(g.n) if g.degree(v) == 0]
    if isolated:
        raise PreconditionError(f"isolated vertices {isolated} are not supported")
    edges = list(g.edges)
    labels = [g.label(v) for v in range(g.n)]
    for i, (u, v) in enumerate(g.edges):
        w = g.n + i
        edges += [(u, w), (v, w)]
        labels.append(f"e:{u}-{v}")
    return LabeledInstance(Graph(g.n + g.m, tuple(edges), tuple(labels)), k)


# -- OR-composition from 3-SAT ------------------------------------------------

def cross_compose_3sat(formulas: Sequence[CnfFormula]) -> LabeledInstance:
    """Compose ``t`` 3-SAT instances on ``n`` variables and ``m`` clauses into
    one graph that has a dominating set of size ``n + t`` iff some formula is
    satisfiable.

    Layout: literal vertices ``x_l, ~x_l`` at ``2(l-1), 2(l-1)+1``; triangle
    apexes ``a_l``; clause vertices per formula; one ``r^i`` per formula
    (adjacent to its clauses and to ``y^i``); the ``y^i``; and a final apex
    adjacent to every ``y^i``.
    """
    if not formulas:
        raise PreconditionError("need at least one formula")
    n, m = formulas[0].n_vars, formulas[0].m
    if any(f.n_vars != n or f.m != m for f in formulas):
        raise PreconditionError("all formulas must share the same variable and clause counts")
    t = len(formulas)
    lit = lambda l: 2 * (abs(l) - 1) + (0 if l > 0 else 1)  # noqa: E731
    a_id = lambda l: 2 * n + l  # noqa: E731
    c_id = lambda i, j: 3 * n + i * m + j  # noqa: E731
    r_id = lambda i: 3 * n + t * m + i  # noqa: E731
    y_id = lambda i: 3 * n + t * m + t + i  # noqa: E731
    apex = 3 * n + t * (m + 2)
    size = apex + 1

    labels = [""] * size
    edges = set()
    for l in range(n):
        labels[2 * l], labels[2 * l + 1], labels[a_id(l)] = f"x{l + 1}", f"~x{l + 1}", f"a{l + 1}"
        edges |= {(2 * l, 2 * l + 1), (2 * l, a_id(l)), (2 * l + 1, a_id(l))}
    for i, f in enumerate(formulas):
        labels[r_id(i)], labels[y_id(i)] = f"r{i + 1}", f"y{i + 1}"
        edges |= {(r_id(i), y_id(i)), (y_id(i), apex)}
        for j, clause in enumerate(f.clauses):
            labels[c_id(i, j)] = f"c{i + 1}.{j + 1}"
            edges.add((c_id(i, j), r_id(i)))
            # repeated literals collapse into one edge
            edges |= {(lit(l), c_id(i, j)) for l in clause}
    labels[apex] = "alpha"

    literals = tuple(range(2 * n))
    apexes = tuple(range(2 * n, 3 * n))
    clause_vs = tuple(range(3 * n, 3 * n + t * m))
    r_vs = tuple(r_id(i) for i in range(t))
    y_vs = tuple(y_id(i) for i in range(t))
    return LabeledInstance(
        Graph.from_edges(size, edges, labels),
        n + t,
        {
            "modulator": literals + apexes + (apex,),
            "elimination_order": clause_vs + r_vs + y_vs + (apex,) + literals + apexes,
            "literals": literals,
            "triangle_apexes": apexes,
            "clauses": clause_vs,
            "roots": r_vs,
            "ys": y_vs,
            "apex": (apex,),
        },
        {"modulator": 2, "elimination_order": 4},
        c=2,
    )


# -- conflict lower-bound family ----------------------------------------------

def lower_bound_family(t: int) -> tuple[Graph, VertexSet]:
    """Graph on triangles ``{a_i, b_i, c_i}`` (``i`` in ``1..2t``) strung along
    the path ``v1 a1 b1 b2 a2 a3 b3 b4 ... a_{2t} v2``, and the set of all
    ``c_i``. Forbidding all ``c_i`` costs one unit of independence number;
    forbidding any proper subset costs nothing.

    Ids: ``v1 = 0``; ``a_i, b_i, c_i = 3i-2, 3i-1, 3i``; ``v2 = 6t+1``.
    """
    if t < 1:
        raise PreconditionError("t must be at least 1")
    a = lambda i: 3 * i - 2  # noqa: E731
    b = lambda i: 3 * i - 1  # noqa: E731
    c = lambda i: 3 * i  # noqa: E731
    v1, v2 = 0, 6 * t + 1
    edges = []
    labels = ["v1"]
    for i in range(1, 2 * t + 1):
        edges += [(a(i), b(i)), (c(i), a(i)), (c(i), b(i))]
        labels += [f"a{i}", f"b{i}", f"c{i}"]
    labels.append("v2")
    edges += [(b(2 * i - 1), b(2 * i)) for i in range(1, t + 1)]
    edges += [(a(2 * i), a(2 * i + 1)) for i in range(1, t)]
    edges += [(v1, a(1)), (a(2 * t), v2)]
    return Graph(6 * t + 2, tuple(edges), tuple(labels)), tuple(c(i) for i in range(1, 2 * t + 1))


# -- compositions ------------------------------------------------------------

def compose_disjoint_union(instances: Sequence[tuple[Graph, int]]) -> tuple[Graph, int]:
    """Disjoint union with summed budgets."""
    g, _ = disjoint_union([g for g, _ in instances])
    return g, sum(k for _, k in instances)


def gen_logtd_instance(u: int, w: int, bip_edges: Iterable[tuple[int, int]], k: int) -> LabeledInstance:
    """Red-Blue Dominating Set ``(U, W, E, k)`` to Dominating Set: subdivide
    the bipartite graph ``3u`` times and add a square grid on ``(3u+1)^4``
    vertices with an apex adjacent to all of it; budget ``k + u*m + 1``.

    ``bip_edges`` are pairs ``(i, j)`` with ``i`` in ``0..u-1`` (red side)
    and ``j`` in ``0..w-1`` (blue side). Ids: ``U`` first, then ``W``, then
    subdivision vertices, then the grid row-major, apex last.
    """
    if u < 1:
        raise PreconditionError("u must be at least 1")
    pairs = sorted(set(bip_edges))
    for i, j in pairs:
        if not (0 <= i < u and 0 <= j < w):
            raise PreconditionError(f"edge ({i}, {j}) outside the bipartition")
    base = Graph(u + w, tuple((i, u + j) for i, j in pairs), tuple(f"u{i}" for i in range(u)) + tuple(f"w{j}" for j in range(w)))
    sub = subdivide(base, 3 * u)
    side = (3 * u + 1) ** 2
    grid = [(r * side + col, r * side + col + 1) for r in range(side) for col in range(side - 1)]
    grid += [(r * side + col, (r + 1) * side + col) for r in range(side - 1) for col in range(side)]
    apex = side * side
    grid += [(v, apex) for v in range(side * side)]
    grid_g = Graph(side * side + 1, tuple(grid), tuple(f"g{v // side}.{v % side}" for v in range(side * side)) + ("alpha",))
    g, offsets = disjoint_union([sub, grid_g])
    modulator = tuple(range(u)) + tuple(range(offsets[1], g.n))
    return LabeledInstance(
        g,
        k + u * len(pairs) + 1,
        {"modulator": modulator, "blue": tuple(range(u, u + w))},
        {"modulator": int(math.floor(2 * math.log2(3 * u + 1)))},
    )


def remainder_components(inst: LabeledInstance) -> list[Graph]:
    """Components of ``g`` minus the modulator certificate, as graphs."""
    rest = sorted(set(range(inst.g.n)) - set(inst.modulator))
    h, _ = induced_subgraph(inst.g, rest)
    return [induced_subgraph(h, comp)[0] for comp in components(h)]


def is_forest(g: Graph) -> bool:
    return g.m == g.n - len(components(g))


def max_component_td(graphs: Iterable[Graph]) -> int:
    return max((td_exact(h)[0] for h in graphs), default=0)
