"""Exact solvers and brute-force oracles: maximum independent set (three
interchangeable engines), domination number, 3-SAT, and conflict values."""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Iterable

from tdkernel.errors import InvariantError, PreconditionError, ResourceLimitError
from tdkernel.graph import Graph, VertexSet, bits, mask_components, to_mask, vertex_set
from tdkernel.treedepth import DEFAULT_NODE_BUDGET, TdDecomposition, td_of_subset

BRUTE_FORCE_LIMIT = 24


# -- maximum independent set -------------------------------------------------

class WeightedMIS:
    """Memoized branch-and-reduce maximum weight independent set.

    Works on bitmasks over a fixed host graph, so one instance can answer
    many queries on different vertex subsets and share its memo table.
    Reductions: component splitting, and taking a simplicial vertex whose
    weight dominates its neighbours'. Branching is on a max-degree vertex.
    """

    def __init__(self, masks, weights=None, node_budget: int = DEFAULT_NODE_BUDGET):
        self.masks = list(masks)
        self.weights = list(weights) if weights is not None else [1] * len(self.masks)
        self.memo: dict[int, tuple[int, int]] = {0: (0, 0)}
        self.nodes = 0
        self.node_budget = node_budget

    def solve(self, mask: int) -> tuple[int, int]:
        """(weight, chosen-vertex mask) of a max weight independent set in ``mask``."""
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        comps = mask_components(self.masks, mask)
        if len(comps) > 1:
            total, chosen = 0, 0
            for comp in comps:
                w, s = self.solve(comp)
                total += w
                chosen |= s
            out = (total, chosen)
        else:
            out = self._solve_connected(mask)
        self.memo[mask] = out
        return out

    def _solve_connected(self, mask: int) -> tuple[int, int]:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise ResourceLimitError(f"independent set search exceeded {self.node_budget} nodes")
        masks, weights = self.masks, self.weights
        pivot, pivot_deg = -1, -1
        for v in bits(mask):
            nb = masks[v] & mask
            if self._simplicial_dominant(v, nb):
                w, s = self.solve(mask & ~nb & ~(1 << v))
                return w + weights[v], s | (1 << v)
            d = nb.bit_count()
            if d > pivot_deg:
                pivot, pivot_deg = v, d
        w_out, s_out = self.solve(mask & ~(1 << pivot))
        w_in, s_in = self.solve(mask & ~masks[pivot] & ~(1 << pivot))
        w_in += weights[pivot]
        if w_in > w_out:
            return w_in, s_in | (1 << pivot)
        return w_out, s_out

    def _simplicial_dominant(self, v: int, nb: int) -> bool:
        wv = self.weights[v]
        for u in bits(nb):
            if self.weights[u] > wv or (self.masks[u] | (1 << u)) & nb != nb:
                return False
        return True


def _twin_quotient(g: Graph) -> tuple[list[int], list[int], list[int]]:
    """Merge false twins (equal open neighbourhoods, hence non-adjacent).

    Returns per-class neighbour masks, class weights (sizes) and the member
    mask of each class in ``g``'s ids.
    """
    classes: dict[int, int] = {}
    members: list[int] = []
    for v in range(g.n):
        key = g.masks[v]
        if key not in classes:
            classes[key] = len(members)
            members.append(0)
        members[classes[key]] |= 1 << v
    rep = [0] * g.n
    for i, mem in enumerate(members):
        for v in bits(mem):
            rep[v] = i
    qmasks = []
    for mem in members:
        v = (mem & -mem).bit_length() - 1
        qmasks.append(to_mask(rep[u] for u in bits(g.masks[v])))
    return qmasks, [m.bit_count() for m in members], members


def alpha_bnb(g: Graph, node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, VertexSet]:
    """Independence number by branch-and-reduce on the false-twin quotient."""
    qmasks, weights, members = _twin_quotient(g)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * len(qmasks) + 1000))
    try:
        value, chosen = WeightedMIS(qmasks, weights, node_budget).solve((1 << len(qmasks)) - 1)
    finally:
        sys.setrecursionlimit(old)
    witness = 0
    for i in bits(chosen):
        witness |= members[i]
    return value, tuple(bits(witness))


def alpha_td(
    g: Graph,
    decomp: TdDecomposition | None = None,
    forbidden: Iterable[int] = (),
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[int, VertexSet]:
    """Independence number by dynamic programming over a treedepth
    decomposition.

    The state at a forest node is the set of its ancestors already in the
    solution, so the table has ``O(n * 2^height)`` entries. ``decomp`` may
    cover a subset of ``g`` (the DP then solves ``g`` restricted to it);
    ``forbidden`` vertices are never chosen.
    """
    if decomp is None:
        decomp = td_of_subset(g, range(g.n), node_budget)[1]
    masks = g.masks
    banned = to_mask(forbidden)
    children = decomp.children()
    memo: dict[tuple[int, int], tuple[int, int]] = {}

    def best(v: int, above: int) -> tuple[int, int]:
        key = (v, above)
        hit = memo.get(key)
        if hit is not None:
            return hit
        w_out, s_out = 0, 0
        for ch in children[v]:
            w, s = best(ch, above)
            w_out += w
            s_out |= s
        out = (w_out, s_out)
        if not (banned >> v) & 1 and not masks[v] & above:
            w_in, s_in = 1, 1 << v
            inner = above | (1 << v)
            for ch in children[v]:
                w, s = best(ch, inner)
                w_in += w
                s_in |= s
            if w_in > w_out:
                out = (w_in, s_in)
        memo[key] = out
        return out

    total, chosen = 0, 0
    for r in decomp.roots:
        w, s = best(r, 0)
        total += w
        chosen |= s
    return total, tuple(bits(chosen))


def alpha_bruteforce(g: Graph) -> tuple[int, VertexSet]:
    """Independence number by enumerating all ``2^n`` vertex subsets."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"brute force limited to {BRUTE_FORCE_LIMIT} vertices")
    best, arg = 0, 0
    masks = g.masks
    for s in range(1 << g.n):
        size = s.bit_count()
        if size <= best:
            continue
        if all(not (masks[v] & s) for v in bits(s)):
            best, arg = size, s
    return best, tuple(bits(arg))


def alpha_exact(g: Graph, method: str = "bnb", node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, VertexSet]:
    """Maximum independent set of ``g``: ``(size, witness)``.

    ``method`` is ``bnb`` (branch-and-reduce), ``td`` (decomposition DP),
    ``brute`` (exhaustive) or ``check`` (runs ``bnb`` and ``td`` and insists
    they agree).
    """
    if method == "bnb":
        return alpha_bnb(g, node_budget)
    if method == "td":
        return alpha_td(g, node_budget=node_budget)
    if method == "brute":
        return alpha_bruteforce(g)
    if method == "check":
        a = alpha_bnb(g, node_budget)
        b = alpha_td(g, node_budget=node_budget)
        if a[0] != b[0]:
            raise AssertionError(f"IS engines disagree: bnb={a[0]} td={b[0]}")
        return a
    raise PreconditionError(f"unknown method {method!r}")


# -- conflicts ---------------------------------------------------------------

def conf_vertices(g: Graph, rprime: Iterable[int], y: Iterable[int]) -> int:
    """Drop in ``alpha(g[R'])`` caused by forbidding ``Y``:
    ``alpha(R') - alpha(R' - Y)``."""
    rmask = to_mask(vertex_set(rprime, g.n))
    ymask = to_mask(vertex_set(y, g.n))
    if ymask & ~rmask:
        raise PreconditionError("Y must be a subset of R'")
    solver = WeightedMIS(g.masks)
    return solver.solve(rmask)[0] - solver.solve(rmask & ~ymask)[0]


# -- domination --------------------------------------------------------------

def _greedy_dominating(closed: list[int], full: int) -> int:
    chosen, dominated = 0, 0
    while dominated != full:
        v = max(range(len(closed)), key=lambda u: ((closed[u] & ~dominated).bit_count(), -u))
        chosen |= 1 << v
        dominated |= closed[v]
    return chosen


def gamma_exact(g: Graph, kmax: int, node_budget: int = 5_000_000) -> int | None:
    """Domination number of ``g`` if it is at most ``kmax``, else ``None``.

    Depth-first search that branches on which vertex of ``N[u]`` dominates
    the undominated vertex ``u`` with fewest options; pruned by a greedy
    upper bound and a coverage lower bound.
    """
    return dominating_set(g, kmax, node_budget)[0]


def dominating_set(g: Graph, kmax: int, node_budget: int = 5_000_000) -> tuple[int | None, VertexSet]:
    """Like :func:`gamma_exact` but also returns a minimum dominating set."""
    n = g.n
    if n == 0:
        return 0, ()
    full = g.full_mask()
    closed = [g.masks[v] | (1 << v) for v in range(n)]
    greedy = _greedy_dominating(closed, full)
    best_size = greedy.bit_count()
    best_set = greedy
    if best_size > kmax:
        best_size, best_set = kmax + 1, -1
    seen: dict[int, int] = {}
    nodes = 0

    def dfs(dominated: int, chosen: int, size: int) -> None:
        nonlocal best_size, best_set, nodes
        if dominated == full:
            if size < best_size:
                best_size, best_set = size, chosen
            return
        if size + 1 >= best_size:
            return
        prev = seen.get(dominated)
        if prev is not None and prev <= size:
            return
        seen[dominated] = size
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(f"dominating set search exceeded {node_budget} nodes")
        undominated = full & ~dominated
        cover = max((closed[v] & undominated).bit_count() for v in range(n))
        need = -(-undominated.bit_count() // cover)
        if size + need >= best_size:
            return
        u = min(bits(undominated), key=lambda w: closed[w].bit_count())
        options = sorted(bits(closed[u]), key=lambda w: -(closed[w] & undominated).bit_count())
        for w in options:
            dfs(dominated | closed[w], chosen | (1 << w), size + 1)

    dfs(0, 0, 0)
    if best_size > kmax or best_set < 0:
        return None, ()
    return best_size, tuple(bits(best_set))


def gamma_bruteforce(g: Graph, kmax: int) -> int | None:
    """Domination number by trying every subset of size ``0..kmax``."""
    full = g.full_mask()
    closed = [g.masks[v] | (1 << v) for v in range(g.n)]
    for size in range(min(kmax, g.n) + 1):
        for combo in itertools.combinations(range(g.n), size):
            dom = 0
            for v in combo:
                dom |= closed[v]
            if dom == full:
                return size
    return None


def vertex_cover_number(g: Graph) -> tuple[int, VertexSet]:
    """Minimum vertex cover as the complement of a maximum independent set."""
    a, s = alpha_bnb(g)
    chosen = set(s)
    return g.n - a, tuple(v for v in range(g.n) if v not in chosen)


# -- satisfiability ----------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    """3-CNF formula. Literals are signed 1-based variable indices."""

    n_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise InvariantError(f"clause {c} does not have exactly 3 literals")
            if any(l == 0 or abs(l) > self.n_vars for l in c):
                raise InvariantError(f"clause {c} mentions a variable outside 1..{self.n_vars}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: int) -> bool:
        """``assignment`` bit ``i-1`` is the truth value of variable ``i``."""
        for c in self.clauses:
            if not any(((assignment >> (abs(l) - 1)) & 1) == (l > 0) for l in c):
                return False
        return True


def sat_bruteforce(f: CnfFormula) -> bool:
    """Satisfiability by truth-table enumeration."""
    if f.n_vars > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"truth tables limited to {BRUTE_FORCE_LIMIT} variables")
    return any(f.satisfied_by(a) for a in range(1 << f.n_vars))
