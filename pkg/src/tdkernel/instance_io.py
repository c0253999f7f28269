"""DIMACS-style instance files and JSON kernelization reports.

Grammar (one record per line, 0-based vertex ids)::

    c <free text>                 comment
    c cert <name> <bound|-> ids   certificate carried inside a comment
    p <graph|atdis> <n> <c> <k>   header, exactly once, before any record
    v <id> <X|R>                  vertex role (atdis only; default R)
    e <u> <v>                     plain edge
    h <v1> ... <vj>               hyperedge (atdis only)
    x <v1> ...                    modulator certificate (graph only)

A ``graph`` file parses to a :class:`LabeledInstance`, an ``atdis`` file to
an :class:`AnnotatedInstance`. Serialization is canonical, so
``serialize(parse(serialize(obj))) == serialize(obj)``.
"""

from __future__ import annotations

import json
import logging
from collections import Counter

from tdkernel.annotated import AnnotatedInstance
from tdkernel.errors import InvariantError
from tdkernel.graph import Graph
from tdkernel.kernel import KernelTrace
from tdkernel.reductions import LabeledInstance
from tdkernel.solvers import CnfFormula

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def parse_instance(text: str) -> LabeledInstance | AnnotatedInstance:
    header = None
    roles: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    hyper: list[tuple[int, ...]] = []
    modulator: list[int] = []
    certs: dict[str, tuple[int, ...]] = {}
    bounds: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if not tok:
            continue
        kind = tok[0]
        if kind == "c":
            if len(tok) >= 3 and tok[1] == "cert":
                name = tok[2]
                if len(tok) < 4:
                    raise ParseError(lineno, "certificate needs a bound or '-'")
                if tok[3] != "-":
                    bounds[name] = _ints([tok[3]], lineno)[0]
                certs[name] = tuple(_ints(tok[4:], lineno))
            continue
        if kind == "p":
            if header is not None:
                raise ParseError(lineno, "duplicate header")
            if len(tok) != 5 or tok[1] not in ("graph", "atdis"):
                raise ParseError(lineno, "header must be 'p <graph|atdis> <n> <c> <k>'")
            header = (tok[1], *_ints(tok[2:], lineno))
            continue
        if header is None:
            raise ParseError(lineno, f"{kind!r} record before the header")
        n = header[1]
        if kind == "e":
            if len(tok) != 3:
                raise ParseError(lineno, "edge line must be 'e <u> <v>'")
            u, v = _ints(tok[1:], lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(lineno, f"edge endpoint out of range 0..{n - 1}")
            if u == v:
                raise ParseError(lineno, f"self-loop at {u}")
            edges.append((u, v))
        elif kind == "v":
            if header[0] != "atdis":
                raise ParseError(lineno, "role lines are only allowed in atdis files")
            if len(tok) != 3 or tok[2] not in ("X", "R"):
                raise ParseError(lineno, "role line must be 'v <id> <X|R>'")
            (vid,) = _ints(tok[1:2], lineno)
            if not 0 <= vid < n:
                raise ParseError(lineno, f"vertex {vid} out of range 0..{n - 1}")
            roles[vid] = tok[2]
        elif kind == "h":
            if header[0] != "atdis":
                raise ParseError(lineno, "hyperedges are only allowed in atdis files")
            hv = _ints(tok[1:], lineno)
            if not hv:
                raise ParseError(lineno, "empty hyperedge")
            if any(not 0 <= v < n for v in hv):
                raise ParseError(lineno, f"hyperedge vertex out of range 0..{n - 1}")
            hyper.append(tuple(hv))
        elif kind == "x":
            if header[0] != "graph":
                raise ParseError(lineno, "modulator lines are only allowed in graph files; use role lines")
            xs = _ints(tok[1:], lineno)
            if any(not 0 <= v < n for v in xs):
                raise ParseError(lineno, f"modulator vertex out of range 0..{n - 1}")
            modulator += xs
        else:
            raise ParseError(lineno, f"unknown record type {kind!r}")
    if header is None:
        raise ParseError(0, "missing header")
    kind, n, c, k = header
    dup = [e for e, cnt in Counter(tuple(sorted(e)) for e in edges).items() if cnt > 1]
    if dup:
        raise InvariantError(f"no parallel edges: {dup[0]} appears more than once")

    if kind == "graph":
        if modulator:
            certs["modulator"] = tuple(sorted(set(modulator)))
        return LabeledInstance(Graph(n, tuple(edges)), k, certs, bounds, c)

    x = sorted(v for v, r in roles.items() if r == "X")
    xs = set(x)
    inner = [e for e in edges if e[0] in xs and e[1] in xs]
    if inner:
        log.warning("%d edge(s) inside X converted to size-2 hyperedges", len(inner))
    plain = [e for e in edges if not (e[0] in xs and e[1] in xs)]
    for h in hyper:
        if not set(h) <= xs:
            raise InvariantError(f"hyperedges must lie inside X: {h} does not")
    inst = AnnotatedInstance(Graph(n, tuple(plain)), tuple(x), tuple(hyper) + tuple(inner), k, c)
    inst.validate()
    return inst


def serialize_instance(obj: LabeledInstance | AnnotatedInstance | Graph) -> str:
    if isinstance(obj, Graph):
        obj = LabeledInstance(obj, 0)
    if isinstance(obj, AnnotatedInstance):
        lines = [f"p atdis {obj.n} {obj.c} {obj.k}"]
        xs = set(obj.x)
        lines += [f"v {v} {'X' if v in xs else 'R'}" for v in range(obj.n)]
        lines += [f"e {u} {v}" for u, v in obj.g.edges]
        lines += ["h " + " ".join(map(str, h)) for h in obj.hyperedges]
        return "\n".join(lines) + "\n"
    lines = [f"p graph {obj.g.n} {obj.c} {obj.k}"]
    for name in sorted(obj.certificates):
        if name == "modulator":
            continue
        bound = obj.bounds.get(name)
        ids = " ".join(map(str, obj.certificates[name]))
        lines.append(f"c cert {name} {'-' if bound is None else bound} {ids}".rstrip())
    if "modulator" in obj.bounds:
        lines.append(f"c cert modulator {obj.bounds['modulator']}")
    lines += [f"e {u} {v}" for u, v in obj.g.edges]
    if obj.modulator:
        lines.append("x " + " ".join(map(str, sorted(obj.modulator))))
    return "\n".join(lines) + "\n"


def parse_cnf(text: str) -> CnfFormula:
    """DIMACS CNF with clauses of exactly three literals."""
    n_vars = None
    lits: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if not tok or tok[0] in ("c", "%"):
            continue
        if tok[0] == "p":
            if len(tok) != 4 or tok[1] != "cnf":
                raise ParseError(lineno, "header must be 'p cnf <vars> <clauses>'")
            n_vars = _ints(tok[2:3], lineno)[0]
            continue
        lits += _ints(tok, lineno)
    if n_vars is None:
        raise ParseError(0, "missing 'p cnf' header")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    return CnfFormula(n_vars, tuple(clauses))


# -- reports -----------------------------------------------------------------

RULES = ("rule1", "rule2", "rule3", "lift")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "schema_version", "initial_k", "final_k", "k_delta", "rule_counts",
        "levels", "component_bound_ok", "sizes", "wall_time", "events",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "initial_k": {"type": "integer"},
        "final_k": {"type": "integer"},
        "k_delta": {"type": "integer"},
        "rule_counts": {
            "type": "object",
            "required": list(RULES),
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "level", "rule1", "rule2", "rule3", "lift", "x_size", "h_count",
                    "h_total", "components", "component_bound", "component_bound_ok",
                ],
                "properties": {
                    "level": {"type": "integer", "minimum": 1},
                    "components": {"type": "integer", "minimum": 0},
                    "component_bound_ok": {"type": "boolean"},
                },
            },
        },
        "component_bound_ok": {"type": "boolean"},
        "sizes": {"type": "object"},
        "wall_time": {"type": ["number", "null"]},
        "events": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rule", "level", "vertices", "k_delta", "sets"],
                "properties": {"rule": {"enum": list(RULES)}},
            },
        },
    },
}


def report_dict(trace: KernelTrace, sizes: dict | None = None, wall_time: float | None = None) -> dict:
    levels = []
    for snap in trace.levels:
        row = {"level": snap.level}
        row.update({r: trace.count(r, snap.level) for r in RULES})
        row.update(
            x_size=snap.x_size, h_count=snap.h_count, h_total=snap.h_total,
            components=snap.components, component_bound=snap.component_bound, component_bound_ok=snap.component_bound_ok,
        )
        levels.append(row)
    return {
        "schema_version": SCHEMA_VERSION,
        "initial_k": trace.initial_k,
        "final_k": trace.final_k,
        "k_delta": trace.final_k - trace.initial_k,
        "rule_counts": {r: trace.count(r) for r in RULES},
        "levels": levels,
        "component_bound_ok": all(s.component_bound_ok for s in trace.levels),
        "sizes": dict(sizes or {}),
        "wall_time": wall_time,
        "events": trace.to_dict()["events"],
    }


def emit_report(trace: KernelTrace, sizes: dict | None = None, wall_time: float | None = None) -> str:
    """Machine-readable JSON report. Pass ``wall_time=None`` for a report that
    is byte-identical across runs."""
    return json.dumps(report_dict(trace, sizes, wall_time), indent=2, sort_keys=True) + "\n"
