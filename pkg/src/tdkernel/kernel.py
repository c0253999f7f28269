"""Polynomial kernel for Independent Set parameterized by a c-treedepth
modulator.

Per level ``c`` the kernelizer runs three reduction rules, each to
exhaustion and in this order, then moves the root of an optimal treedepth
decomposition of every remaining ``R``-component into the modulator and
recurses at level ``c - 1``:

* rule 1 deletes a modulator vertex ``u`` whose conflict on ``R`` exceeds
  ``|X|``;
* rule 2 forbids a chunk (hyperedge-free subset of ``X`` of size at most
  ``2^c``) whose conflict on ``R`` exceeds ``|X|`` by adding it as a
  hyperedge;
* rule 3 deletes an ``R``-component on which every chunk has zero conflict
  and lowers ``k`` by the component's independence number.

The result has ``R`` empty and is turned into a plain graph by
:func:`annotated_to_plain`.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable

from tdkernel.annotated import AnnotatedInstance, independent_subsets
from tdkernel.errors import InvariantError, PreconditionError
from tdkernel.graph import Graph, VertexSet, bits, mask_components, to_mask, vertex_set
from tdkernel.solvers import alpha_td
from tdkernel.treedepth import DEFAULT_NODE_BUDGET, TdDecomposition, compute_modulator, is_c_modulator, td_of_subset

log = logging.getLogger(__name__)


def chunk_size_limit(c: int) -> int:
    return 2**c


def component_bound(x_size: int, c: int) -> int:
    """``|X| * sum_{i=1}^{2^c} C(|X|, i)``: the most ``R``-components that can
    survive rules 1-3 at level ``c``."""
    return x_size * sum(math.comb(x_size, i) for i in range(1, chunk_size_limit(c) + 1))


# -- trace -------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEvent:
    rule: str
    level: int
    vertices: tuple[int, ...] = ()
    k_delta: int = 0
    sets: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class LevelSnapshot:
    level: int
    x_size: int
    h_count: int
    h_total: int
    components: int
    component_bound: int

    @property
    def component_bound_ok(self) -> bool:
        return self.components <= self.component_bound


@dataclass
class KernelTrace:
    """Ordered rule applications plus a size snapshot per level, taken after
    rules 1-3 and before root lifting. Vertex ids are those of the input."""

    initial_k: int
    events: list[TraceEvent] = field(default_factory=list)
    levels: list[LevelSnapshot] = field(default_factory=list)

    @property
    def final_k(self) -> int:
        return self.initial_k + sum(e.k_delta for e in self.events)

    def count(self, rule: str, level: int | None = None) -> int:
        return sum(1 for e in self.events if e.rule == rule and (level is None or e.level == level))

    def to_dict(self) -> dict:
        return {
            "initial_k": self.initial_k,
            "final_k": self.final_k,
            "events": [
                {**asdict(e), "vertices": list(e.vertices), "sets": [list(s) for s in e.sets]}
                for e in self.events
            ],
            "levels": [{**asdict(s), "component_bound_ok": s.component_bound_ok} for s in self.levels],
        }


# -- conflict oracle ---------------------------------------------------------

class ConfOracle:
    """Independence numbers of ``R``-subsets, keyed by origin ids.

    Edges inside ``R`` never change during a kernelization run (vertices
    only leave ``R``), so one graph on origin ids serves every level. Each
    component gets an exact treedepth decomposition once; independence
    numbers come from the decomposition DP with the queried set forbidden.
    """

    def __init__(self, inst: AnnotatedInstance, node_budget: int = DEFAULT_NODE_BUDGET):
        size = max(inst.origin, default=-1) + 1
        rm = inst.r_mask
        edges = [
            (inst.origin[u], inst.origin[v])
            for u, v in inst.g.edges
            if (rm >> u) & 1 and (rm >> v) & 1
        ]
        self.graph = Graph(size, tuple(edges))
        self.node_budget = node_budget
        self._decomp: dict[int, TdDecomposition] = {}
        self._alpha: dict[tuple[int, int], int] = {}

    def decomposition(self, comp: int) -> TdDecomposition:
        d = self._decomp.get(comp)
        if d is None:
            d = td_of_subset(self.graph, bits(comp), self.node_budget)[1]
            self._decomp[comp] = d
        return d

    def root(self, comp: int) -> int:
        (r,) = self.decomposition(comp).roots
        return r

    def alpha(self, comp: int, forbidden: int = 0) -> int:
        """``alpha(comp - forbidden)`` for an origin-id component mask."""
        key = (comp, forbidden & comp)
        hit = self._alpha.get(key)
        if hit is None:
            hit = alpha_td(self.graph, self.decomposition(comp), bits(key[1]))[0]
            self._alpha[key] = hit
        return hit


class _View:
    """Per-instance precomputation: components in current and origin ids."""

    def __init__(self, inst: AnnotatedInstance, oracle: ConfOracle):
        self.inst = inst
        self.oracle = oracle
        self.comps = inst.r_components()
        origin = inst.origin
        self.origin_comps = [to_mask(origin[v] for v in bits(c)) for c in self.comps]
        self.x_size = len(inst.x)

    def to_origin(self, mask: int) -> int:
        return to_mask(self.inst.origin[v] for v in bits(mask))

    def conf_component(self, i: int, xprime: int) -> int:
        y = self.inst.neighborhood_in(xprime, self.comps[i])
        if not y:
            return 0
        oc = self.origin_comps[i]
        return self.oracle.alpha(oc) - self.oracle.alpha(oc, self.to_origin(y))

    def conf_r(self, xprime: int) -> int:
        return sum(self.conf_component(i, xprime) for i in range(len(self.comps)))


def _oracle(inst: AnnotatedInstance, oracle: ConfOracle | None) -> ConfOracle:
    return oracle if oracle is not None else ConfOracle(inst)


# -- chunks and rules --------------------------------------------------------

def enumerate_chunks(inst: AnnotatedInstance) -> list[VertexSet]:
    """Hyperedge-free subsets of ``X`` of size ``1..2^c``, lexicographic."""
    return [
        tuple(bits(s))
        for s in independent_subsets(inst.x, inst.hyperedge_masks, chunk_size_limit(inst.c))
    ]


def _rule1(inst: AnnotatedInstance, oracle: ConfOracle) -> tuple[AnnotatedInstance, TraceEvent | None]:
    view = _View(inst, oracle)
    for u in inst.x:
        if view.conf_r(1 << u) > view.x_size:
            event = TraceEvent("rule1", inst.c, (inst.origin[u],))
            return inst.without(1 << u), event
    return inst, None


def _rule2_pass(inst: AnnotatedInstance, oracle: ConfOracle, first_only: bool):
    """Scan chunks lexicographically, forbidding each one whose conflict
    exceeds ``|X|``. Forbidding a chunk never changes other chunks'
    conflicts, so one continuing scan equals restarting after every hit."""
    view = _View(inst, oracle)
    hyper = inst.hyperedge_masks
    added: list[int] = []
    seen: dict[int, int] = {}
    r_mask = inst.r_mask
    for chunk in independent_subsets(inst.x, hyper, chunk_size_limit(inst.c)):
        y = inst.neighborhood_in(chunk, r_mask)
        conf = seen.get(y)
        if conf is None:
            conf = seen[y] = view.conf_r(chunk)
        if conf > view.x_size:
            hyper.append(chunk)
            added.append(chunk)
            if first_only:
                break
    events = [TraceEvent("rule2", inst.c, sets=(tuple(inst.origin_ids(h)),)) for h in added]
    if not added:
        return inst, events
    new_h = inst.hyperedges + tuple(tuple(bits(h)) for h in added)
    return AnnotatedInstance(inst.g, inst.x, new_h, inst.k, inst.c, inst.origin), events


def _rule3(inst: AnnotatedInstance, oracle: ConfOracle) -> tuple[AnnotatedInstance, TraceEvent | None]:
    view = _View(inst, oracle)
    hyper = inst.hyperedge_masks
    limit = chunk_size_limit(inst.c)
    masks = inst.g.masks
    for i, comp in enumerate(view.comps):
        # chunks are closed under subsets and a chunk's conflict on this
        # component depends only on its members adjacent to the component
        touching = tuple(v for v in inst.x if masks[v] & comp)
        if any(view.conf_component(i, ch) > 0 for ch in independent_subsets(touching, hyper, limit)):
            continue
        a = oracle.alpha(view.origin_comps[i])
        event = TraceEvent("rule3", inst.c, tuple(inst.origin_ids(comp)), -a)
        return inst.without(comp).with_k(inst.k - a), event
    return inst, None


def rule1(inst: AnnotatedInstance, oracle: ConfOracle | None = None) -> tuple[AnnotatedInstance, bool]:
    """Delete the smallest ``u`` in ``X`` with ``conf_R({u}) > |X|``, if any."""
    out, event = _rule1(inst, _oracle(inst, oracle))
    return out, event is not None


def rule2(inst: AnnotatedInstance, oracle: ConfOracle | None = None) -> tuple[AnnotatedInstance, bool]:
    """Add the lexicographically first chunk with ``conf_R > |X|`` to ``H``."""
    out, events = _rule2_pass(inst, _oracle(inst, oracle), first_only=True)
    return out, bool(events)


def rule3(inst: AnnotatedInstance, oracle: ConfOracle | None = None) -> tuple[AnnotatedInstance, bool]:
    """Delete the first ``R``-component on which no chunk has a conflict,
    lowering ``k`` by its independence number."""
    out, event = _rule3(inst, _oracle(inst, oracle))
    return out, event is not None


def rules_applicable(inst: AnnotatedInstance, oracle: ConfOracle | None = None) -> list[str]:
    oracle = _oracle(inst, oracle)
    found = []
    if _rule1(inst, oracle)[1] is not None:
        found.append("rule1")
    if _rule2_pass(inst, oracle, first_only=True)[1]:
        found.append("rule2")
    if _rule3(inst, oracle)[1] is not None:
        found.append("rule3")
    return found


def _lift(inst: AnnotatedInstance, oracle: ConfOracle) -> tuple[AnnotatedInstance, TraceEvent]:
    if inst.c == 0:
        raise InvariantError("R is nonempty at level 0")
    view = _View(inst, oracle)
    back = {o: v for v, o in enumerate(inst.origin)}
    roots = to_mask(back[oracle.root(oc)] for oc in view.origin_comps)
    old_x = inst.x_mask
    plain, moved = [], []
    for u, v in inst.g.edges:
        ends = (1 << u) | (1 << v)
        if ends & roots and ends & old_x:
            moved.append((u, v))
        else:
            plain.append((u, v))
    out = AnnotatedInstance(
        Graph(inst.n, tuple(plain), inst.g.labels),
        tuple(bits(old_x | roots)),
        inst.hyperedges + tuple(moved),
        inst.k,
        inst.c - 1,
        inst.origin,
    )
    event = TraceEvent(
        "lift",
        inst.c,
        tuple(inst.origin_ids(roots)),
        sets=tuple((inst.origin[u], inst.origin[v]) for u, v in moved),
    )
    return out, event


def lift_roots(
    inst: AnnotatedInstance, oracle: ConfOracle | None = None, check: bool = True
) -> AnnotatedInstance:
    """Move each ``R``-component's decomposition root into ``X``; root edges
    to the old ``X`` become size-2 hyperedges and the level drops by one.
    With ``R`` empty the instance is returned unchanged."""
    if not inst.r:
        return inst
    oracle = _oracle(inst, oracle)
    if check:
        pending = rules_applicable(inst, oracle)
        if pending:
            raise PreconditionError(f"reduction rules still applicable: {', '.join(pending)}")
    return _lift(inst, oracle)[0]


# -- driver ------------------------------------------------------------------

def kernelize(
    inst: AnnotatedInstance, validate: bool = False, node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple[AnnotatedInstance, KernelTrace]:
    """Run rules 1, 2, 3 (each exhaustively) and root lifting level by level
    until ``R`` is empty. With ``validate`` every intermediate instance is
    checked against the instance invariants."""
    oracle = ConfOracle(inst, node_budget)
    trace = KernelTrace(inst.k)
    cur = inst
    if validate:
        cur.validate()

    def record(new: AnnotatedInstance, event: TraceEvent | None) -> bool:
        nonlocal cur
        if event is None:
            return False
        cur = new
        trace.events.append(event)
        if validate:
            cur.validate()
        return True

    while cur.r:
        if cur.c == 0:
            raise InvariantError("R is nonempty at level 0")
        while record(*_rule1(cur, oracle)):
            pass
        new, events = _rule2_pass(cur, oracle, first_only=False)
        cur = new
        trace.events.extend(events)
        if validate:
            cur.validate()
        while record(*_rule3(cur, oracle)):
            pass
        x_size = len(cur.x)
        trace.levels.append(
            LevelSnapshot(
                cur.c, x_size, len(cur.hyperedges), cur.hyperedge_total(),
                len(cur.r_components()), component_bound(x_size, cur.c),
            )
        )
        if not cur.r:
            break
        record(*_lift(cur, oracle))
    log.debug("kernelize: %d events, k %d -> %d", len(trace.events), trace.initial_k, trace.final_k)
    return cur, trace


def annotated_to_plain(inst: AnnotatedInstance) -> tuple[Graph, int]:
    """Equivalent plain IS instance for an annotated instance with ``R``
    empty.

    Each vertex ``v_i`` becomes a path ``y^a_i - z_i - y^b_i``; picking both
    ``y`` vertices stands for picking ``v_i``. Each hyperedge ``H`` becomes a
    complete ``|H|``-partite graph with parts of size ``n``, part ``l``
    fully joined to the ``y`` pair of the ``l``-th member of ``H``. The new
    budget is ``n + k + n*m``.
    """
    if inst.r:
        raise PreconditionError("annotated_to_plain needs an instance with R empty")
    n, m = inst.n, len(inst.hyperedges)
    labels = []
    for i in range(n):
        labels += [f"ya:{i}", f"yb:{i}", f"z:{i}"]
    edges = []
    for i in range(n):
        edges += [(3 * i + 2, 3 * i), (3 * i + 2, 3 * i + 1)]
    nxt = 3 * n
    for j, h in enumerate(inst.hyperedges):
        parts = []
        for ell, v in enumerate(h):
            part = list(range(nxt, nxt + n))
            nxt += n
            labels += [f"w:{j}:{ell}:{p}" for p in range(n)]
            for w in part:
                edges += [(w, 3 * v), (w, 3 * v + 1)]
            for prev in parts:
                edges += [(a, b) for a in prev for b in part]
            parts.append(part)
    return Graph(nxt, tuple(edges), tuple(labels)), n + inst.k + n * m


# -- end-to-end --------------------------------------------------------------

def size_exponents(c: int) -> dict[str, int]:
    """Exponents of the polynomial size bounds: modulator/hyperedge growth of
    the annotated kernel, and vertex count of the plain kernel."""
    base = (c + 1) * (c + 2) // 2
    return {"annotated_exponent": 2**base, "plain_exponent": 2 ** (base + 1)}


@dataclass
class PipelineReport:
    trace: KernelTrace
    c: int
    input_vertices: int
    input_edges: int
    input_k: int
    modulator: VertexSet
    modulator_mode: str
    annotated_x: int
    annotated_h: int
    annotated_h_total: int
    kernel_vertices: int
    kernel_edges: int
    kernel_k: int
    wall_time: float | None = None

    def sizes(self) -> dict:
        out = {
            "c": self.c,
            "input_vertices": self.input_vertices,
            "input_edges": self.input_edges,
            "input_k": self.input_k,
            "modulator_size": len(self.modulator),
            "modulator_mode": self.modulator_mode,
            "annotated_x": self.annotated_x,
            "annotated_h": self.annotated_h,
            "annotated_h_total": self.annotated_h_total,
            "kernel_vertices": self.kernel_vertices,
            "kernel_edges": self.kernel_edges,
            "kernel_k": self.kernel_k,
        }
        out.update(size_exponents(self.c))
        return out


def full_pipeline(
    g: Graph,
    k: int,
    c: int,
    x: Iterable[int] | None = None,
    mode: str = "greedy",
    validate: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[Graph, int, PipelineReport]:
    """Kernelize a plain IS instance ``(g, k)`` given (or after computing) a
    c-treedepth modulator. ``alpha(g) >= k`` iff ``alpha(gker) >= kker``."""
    if c < 1:
        raise PreconditionError("c must be at least 1")
    started = time.perf_counter()
    if x is None:
        xs = compute_modulator(g, c, mode, node_budget).x
    else:
        xs = vertex_set(x, g.n)
        mode = "given"
        if not is_c_modulator(g, xs, c, node_budget):
            raise PreconditionError(f"the given set is not a {c}-treedepth modulator")
    inst = AnnotatedInstance.from_graph(g, xs, k, c)
    final, trace = kernelize(inst, validate=validate, node_budget=node_budget)
    gker, kker = annotated_to_plain(final)
    report = PipelineReport(
        trace, c, g.n, g.m, k, xs, mode,
        len(final.x), len(final.hyperedges), final.hyperedge_total(),
        gker.n, gker.m, kker,
        time.perf_counter() - started,
    )
    return gker, kker, report
