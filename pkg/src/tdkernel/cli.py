"""Command-line interface: ``tdkernel <verb> ...``.

Every command exits 0 on success and prints a one-line diagnostic and exits
nonzero on error (2 for bad input, 1 for a failed verification).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from tdkernel.annotated import AnnotatedInstance, alpha_annotated
from tdkernel.errors import InvariantError, PreconditionError, ResourceLimitError
from tdkernel.instance_io import ParseError, emit_report, parse_cnf, parse_instance, serialize_instance
from tdkernel.kernel import annotated_to_plain, full_pipeline, kernelize, size_exponents
from tdkernel.reductions import (
    LabeledInstance,
    compose_disjoint_union,
    cross_compose_3sat,
    ds_subdivision_instance,
    edge_gadget_vc_to_ds,
    gen_logtd_instance,
    lower_bound_family,
    reduce_vc_ds_deg2,
    subdivide,
    verify_certificates,
)
from tdkernel.solvers import alpha_exact, dominating_set
from tdkernel.treedepth import compute_modulator, is_c_modulator, td_exact, verify_decomposition

log = logging.getLogger("tdkernel")


class VerificationFailed(Exception):
    pass


def _read(path: str | None) -> str:
    if path is None:
        raise PreconditionError("missing input file argument")
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load(path: str) -> LabeledInstance | AnnotatedInstance:
    return parse_instance(_read(path))


def _load_graph(path: str) -> LabeledInstance:
    inst = _load(path)
    if not isinstance(inst, LabeledInstance):
        raise PreconditionError(f"{path}: expected a 'p graph' file")
    return inst


def _read_ids(path: str) -> list[int]:
    ids = []
    for line in _read(path).splitlines():
        tok = line.split()
        if not tok or tok[0] in ("c", "p", "e"):
            continue
        if tok[0] == "x":
            tok = tok[1:]
        ids += [int(t) for t in tok]
    return ids


# -- verbs ---------------------------------------------------------------------

def cmd_kernelize(args: argparse.Namespace) -> None:
    inst = _load(args.input)
    started = time.perf_counter()
    if isinstance(inst, AnnotatedInstance):
        final, trace = kernelize(inst, validate=args.validate)
        gker, kker = annotated_to_plain(final)
        sizes = {
            "c": inst.c, "input_vertices": inst.n, "input_k": inst.k,
            "annotated_x": len(final.x), "annotated_h": len(final.hyperedges),
            "annotated_h_total": final.hyperedge_total(),
            "kernel_vertices": gker.n, "kernel_edges": gker.m, "kernel_k": kker,
            **size_exponents(inst.c),
        }
    else:
        c = args.c if args.c is not None else inst.c
        if args.modulator:
            x = _read_ids(args.modulator)
        elif inst.modulator:
            x = inst.modulator
        else:
            x = None
        gker, kker, report = full_pipeline(inst.g, inst.k, c, x, mode=args.mode, validate=args.validate)
        trace, sizes = report.trace, report.sizes()
    elapsed = None if args.no_timing else time.perf_counter() - started
    _write(args.out, serialize_instance(LabeledInstance(gker, kker)))
    if args.report:
        _write(args.report, emit_report(trace, sizes, elapsed))


def cmd_solve(args: argparse.Namespace) -> None:
    inst = _load(args.input)
    if args.problem == "is":
        if isinstance(inst, AnnotatedInstance):
            value, witness = alpha_annotated(inst)
        else:
            value, witness = alpha_exact(inst.g, method=args.method)
        answer = value >= inst.k
    else:
        if isinstance(inst, AnnotatedInstance):
            raise PreconditionError("dominating set needs a 'p graph' file")
        kmax = args.kmax if args.kmax is not None else inst.g.n
        value, witness = dominating_set(inst.g, kmax)
        answer = value is not None and value <= inst.k
    print(json.dumps({"problem": args.problem, "value": value, "k": inst.k, "answer": answer, "witness": list(witness)}))


def cmd_td(args: argparse.Namespace) -> None:
    inst = _load_graph(args.input)
    g = inst.g
    if args.action == "compute":
        value, decomp = td_exact(g)
        assert verify_decomposition(g, decomp)
        parents = [decomp.parent[v] for v in range(g.n)]
        print(json.dumps({"treedepth": value, "parent": parents}))
        return
    if inst.modulator:
        ok = is_c_modulator(g, inst.modulator, inst.c)
        what = f"modulator of size {len(inst.modulator)} is a {inst.c}-treedepth modulator"
    else:
        value, _ = td_exact(g)
        ok = value <= inst.c
        what = f"treedepth {value} <= {inst.c}"
    print(json.dumps({"valid": ok, "check": what}))
    if not ok:
        raise VerificationFailed(f"not verified: {what}")


def cmd_modulator(args: argparse.Namespace) -> None:
    inst = _load_graph(args.input)
    mod = compute_modulator(inst.g, args.c, args.mode)
    out = LabeledInstance(inst.g, inst.k, {"modulator": mod.x}, {"modulator": args.c}, args.c)
    if args.out:
        _write(args.out, serialize_instance(out))
    print(json.dumps({"c": args.c, "mode": args.mode, "size": len(mod.x), "modulator": list(mod.x)}))


def cmd_gen(args: argparse.Namespace) -> None:
    kind = args.kind
    if kind == "subdivide":
        base = _load_graph(args.input)
        if args.times is not None:
            out = LabeledInstance(subdivide(base.g, args.times), base.k)
        else:
            out = ds_subdivision_instance(base.g, base.k, args.c)
    elif kind == "vcds":
        base = _load_graph(args.input)
        out = reduce_vc_ds_deg2(base.g, base.k, base.modulator or None)
    elif kind == "edgegadget":
        base = _load_graph(args.input)
        out = edge_gadget_vc_to_ds(base.g, base.k)
    elif kind == "crosscompose":
        out = cross_compose_3sat([parse_cnf(_read(p)) for p in args.cnf])
    elif kind == "lowerbound":
        g, y = lower_bound_family(args.t)
        out = LabeledInstance(g, 0, {"y": y})
    elif kind == "logtd":
        base = _load_graph(args.input)
        u = args.u
        edges = []
        for a, b in base.g.edges:
            if a < u <= b:
                edges.append((a, b - u))
            else:
                raise PreconditionError(f"edge ({a}, {b}) does not join U=0..{u - 1} to W")
        out = gen_logtd_instance(u, base.g.n - u, edges, base.k)
    elif kind == "union":
        parts = [_load_graph(p) for p in args.inputs]
        g, k = compose_disjoint_union([(p.g, p.k) for p in parts])
        out = LabeledInstance(g, k)
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(kind)
    _write(args.out, serialize_instance(out))


def _decide(inst: LabeledInstance | AnnotatedInstance, oracle: str) -> bool:
    if oracle == "is":
        if isinstance(inst, AnnotatedInstance):
            return alpha_annotated(inst)[0] >= inst.k
        return alpha_exact(inst.g)[0] >= inst.k
    if isinstance(inst, AnnotatedInstance):
        raise PreconditionError("the ds oracle needs 'p graph' files")
    if inst.k < 0:
        return False
    value, _ = dominating_set(inst.g, inst.k)
    return value is not None


def cmd_verify(args: argparse.Namespace) -> None:
    if args.what == "certificates":
        inst = _load_graph(args.input)
        results = verify_certificates(inst)
        print(json.dumps(results, sort_keys=True))
        if not all(results.values()):
            raise VerificationFailed("certificate check failed")
        return
    before, after = _decide(_load(args.before), args.oracle), _decide(_load(args.after), args.oracle)
    print(json.dumps({"oracle": args.oracle, "before": before, "after": after, "equivalent": before == after}))
    if before != after:
        raise VerificationFailed("instances are not equivalent")


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdkernel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("kernelize", help="kernelize an IS instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--c", type=int, default=None, help="level (defaults to the file header)")
    p.add_argument("--modulator", default=None, help="file listing modulator vertex ids")
    p.add_argument("--mode", choices=("greedy", "exact"), default="greedy")
    p.add_argument("--validate", action="store_true", help="check instance invariants after every event")
    p.add_argument("--no-timing", action="store_true", help="omit wall time for reproducible reports")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="solve IS or DS exactly")
    p.add_argument("problem", choices=("is", "ds"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--method", choices=("bnb", "td", "brute", "check"), default="bnb")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("td", help="treedepth computation and checks")
    p.add_argument("action", choices=("compute", "verify"))
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_td)

    p = sub.add_parser("modulator", help="compute a c-treedepth modulator")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_modulator)

    p = sub.add_parser("gen", help="generate reduction instances")
    p.add_argument("kind", choices=("subdivide", "crosscompose", "lowerbound", "vcds", "edgegadget", "logtd", "union"))
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--inputs", nargs="+", default=[])
    p.add_argument("--cnf", nargs="+", default=[])
    p.add_argument("--out", default=None)
    p.add_argument("--c", type=int, default=1, help="subdivide: 3c subdivisions, budget k+mc")
    p.add_argument("--times", type=int, default=None, help="subdivide: raw subdivision count")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--u", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check equivalence or certificates")
    p.add_argument("what", choices=("equivalence", "certificates"))
    p.add_argument("--before", default=None)
    p.add_argument("--after", default=None)
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--oracle", choices=("is", "ds"), default="is")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except VerificationFailed as exc:
        print(f"tdkernel: {exc}", file=sys.stderr)
        return 1
    except (ParseError, InvariantError, PreconditionError, ResourceLimitError, OSError, ValueError) as exc:
        print(f"tdkernel: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
