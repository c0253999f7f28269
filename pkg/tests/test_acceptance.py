"""Acceptance gate: twelve end-to-end criteria, each at its stated tolerance.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion (see ``conftest.py``).
"""

from __future__ import annotations

import itertools
import math
import random
import time

import pytest

from oracles import (
    brute_alpha,
    brute_alpha_annotated,
    brute_conf,
    brute_min_modulator,
    explicit_component_bound,
    planted_graph,
    random_annotated,
    random_cnf,
    random_graph,
    rule_heavy_annotated,
    td_function,
    truth_table_sat,
)
from tdkernel.annotated import AnnotatedInstance, alpha_annotated, conf_chunk
from tdkernel.graph import Graph, bits, components, degeneracy, elimination_width, induced_subgraph, to_mask
from tdkernel.instance_io import emit_report, parse_instance, serialize_instance
from tdkernel.kernel import (
    ConfOracle,
    _View,
    annotated_to_plain,
    full_pipeline,
    kernelize,
    lift_roots,
    rule1,
    rule2,
    rule3,
    rules_applicable,
)
from tdkernel.reductions import (
    LabeledInstance,
    cross_compose_3sat,
    ds_subdivision_instance,
    lower_bound_family,
    reduce_vc_ds_deg2,
)
from tdkernel.solvers import CnfFormula, alpha_bnb, alpha_td, conf_vertices, gamma_exact, vertex_cover_number
from tdkernel.treedepth import compute_modulator, is_c_modulator, td_exact, verify_decomposition


def criterion(number: int, title: str):
    return pytest.mark.criterion(number, title)


def thresholds_agree(alpha_before: int, k_before: int, alpha_after: int, k_after: int, n: int) -> bool:
    """Answers agree for the instance's own budget and for every shifted
    budget in ``0..n+1`` (the transformations never depend on ``k``)."""
    shift = k_after - k_before
    return all((alpha_before >= k) == (alpha_after >= k + shift) for k in range(-1, n + 2))


# -- 1 ---------------------------------------------------------------------------

@criterion(1, "kernel equivalence on 500 planted instances")
def test_c01_pipeline_equivalence():
    rng = random.Random(101)
    started = time.perf_counter()
    failures = []
    for i in range(500):
        c = (1, 2, 3)[i % 3]
        n = rng.randint(1, 14)
        g, x = planted_graph(rng, n, c, rng.randint(0, min(5, n)))
        k = rng.randint(0, n + 1)
        given = x if i % 2 == 0 else None
        gker, kker, _ = full_pipeline(g, k, c, given, mode="greedy")
        expected = brute_alpha(g.n, g.edges) >= k
        if (alpha_bnb(gker)[0] >= kker) != expected:
            failures.append((g, k, c, given))
    elapsed = time.perf_counter() - started
    print(f"criterion 1: 500 instances in {elapsed:.1f}s, {len(failures)} failures")
    assert not failures
    assert elapsed < 300


# -- 2 ---------------------------------------------------------------------------

def _safeness_corpus(seed: int, count: int):
    rng = random.Random(seed)
    for i in range(count):
        yield rule_heavy_annotated(rng) if i % 2 else random_annotated(rng)


@pytest.mark.parametrize("rule", [rule1, rule2, rule3], ids=["rule1", "rule2", "rule3"])
@criterion(2, "per-rule safeness (rules 1-3, root lifting, plain conversion)")
def test_c02_single_rule_safeness(rule):
    applied_count = 0
    for inst in _safeness_corpus(202, 240):
        out, applied = rule(inst)
        applied_count += applied
        a, b = brute_alpha_annotated(inst), brute_alpha_annotated(out)
        assert thresholds_agree(a, inst.k, b, out.k, inst.n)
    print(f"criterion 2: {rule.__name__} fired on {applied_count}/240 instances")
    assert applied_count >= 40


@criterion(2, "per-rule safeness (rules 1-3, root lifting, plain conversion)")
def test_c02_lift_roots_safeness():
    rng = random.Random(203)
    lifted = drawn = 0
    while lifted < 220:
        inst = rule_heavy_annotated(rng) if drawn % 2 else random_annotated(rng)
        drawn += 1
        # exhaust the rules, then lift, level after level
        while True:
            for step in (rule1, rule2, rule3):
                applied = True
                while applied:
                    inst, applied = step(inst)
            if not inst.r:
                break
            assert rules_applicable(inst) == []
            out = lift_roots(inst)
            out.validate()
            assert out.c == inst.c - 1
            assert thresholds_agree(brute_alpha_annotated(inst), inst.k, brute_alpha_annotated(out), out.k, inst.n)
            lifted += 1
            inst = out
    print(f"criterion 2: lift_roots checked {lifted} times on {drawn} instances")


@criterion(2, "per-rule safeness (rules 1-3, root lifting, plain conversion)")
def test_c02_plain_conversion_safeness():
    rng = random.Random(204)
    for i in range(220):
        if i % 2:
            n = rng.randint(1, 5)
            hyper = tuple(tuple(rng.sample(range(n), rng.randint(1, n))) for _ in range(rng.randint(0, 3)))
            inst = AnnotatedInstance(Graph(n, ()), tuple(range(n)), hyper, rng.randint(0, n), 0)
        else:
            inst = kernelize(rule_heavy_annotated(rng))[0]
        g, kprime = annotated_to_plain(inst)
        assert thresholds_agree(brute_alpha_annotated(inst), inst.k, alpha_bnb(g)[0], kprime, inst.n)


# -- 3 ---------------------------------------------------------------------------

@criterion(3, "kernel structure: empty remainder and the explicit component bound")
def test_c03_kernel_structure():
    rng = random.Random(303)
    levels = 0
    for i in range(300):
        inst = rule_heavy_annotated(rng) if i % 2 else random_annotated(rng)
        final, trace = kernelize(inst)
        assert final.r == ()
        for snap in trace.levels:
            assert snap.components <= explicit_component_bound(snap.x_size, snap.level)
            levels += 1
    print(f"criterion 3: 300 runs, {levels} level snapshots checked")


# -- 4 ---------------------------------------------------------------------------

@criterion(4, "conflict values against exhaustive enumeration, monotone on chains")
def test_c04_conf_correctness():
    rng = random.Random(404)
    pairs = chains = 0
    while pairs < 320:
        inst = random_annotated(rng)
        comps = inst.r_components()
        if not comps or not inst.x:
            continue
        view = _View(inst, ConfOracle(inst))
        i = rng.randrange(len(comps))
        comp = comps[i]
        comp_set = set(bits(comp))
        edges = inst.g.edges

        # a chain of vertex sets Y1 within Y2 within Y3 inside the component
        order = list(comp_set)
        rng.shuffle(order)
        cuts = sorted(rng.randint(0, len(order)) for _ in range(3))
        values = []
        for cut in cuts:
            y = set(order[:cut])
            value = conf_vertices(inst.g, comp_set, y)
            assert value == brute_conf(inst.n, edges, comp_set, y)
            values.append(value)
            pairs += 1
        assert values == sorted(values)

        # a chain of modulator subsets X1 within X2
        xs = list(inst.x)
        rng.shuffle(xs)
        cut = rng.randint(1, len(xs))
        xvalues = []
        for xprime in (xs[:cut], xs):
            y = set(bits(inst.neighborhood_in(to_mask(xprime), comp)))
            value = conf_chunk(inst, comp_set, xprime)
            assert value == brute_conf(inst.n, edges, comp_set, y)
            assert view.conf_component(i, to_mask(xprime)) == value
            xvalues.append(value)
            pairs += 1
        assert xvalues == sorted(xvalues)
        chains += 2
    print(f"criterion 4: {pairs} (component, set) pairs on {chains} chains")


# -- 5 ---------------------------------------------------------------------------

@criterion(5, "lower-bound family: independence, conflicts and treedepth")
def test_c05_lower_bound_family_conflicts():
    for t in range(1, 9):
        g, y = lower_bound_family(t)
        r = range(g.n)
        assert alpha_bnb(g)[0] == alpha_td(g)[0] == 2 * t + 2
        assert conf_vertices(g, r, y) == 1
        for ci in y:
            assert conf_vertices(g, r, [v for v in y if v != ci]) == 0


@criterion(5, "lower-bound family: independence, conflicts and treedepth")
def test_c05_lower_bound_family_treedepth_bound():
    measured = {t: td_exact(lower_bound_family(t)[0])[0] for t in range(1, 9)}
    print(f"criterion 5: treedepth by t = {measured}")
    over = {t: (v, math.log2(t) + 3) for t, v in measured.items() if v > math.log2(t) + 3}
    assert not over, f"td exceeds log2(t)+3 for t in {sorted(over)}: {over}"


# -- 6 ---------------------------------------------------------------------------

@criterion(6, "subdivision equivalence for dominating set on all small graphs")
def test_c06_subdivision_equivalence():
    started = time.perf_counter()
    graphs = 0
    for n in range(0, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for m in range(0, min(6, len(pairs)) + 1):
            for edges in itertools.combinations(pairs, m):
                g = Graph(n, edges)
                inst = ds_subdivision_instance(g, 0, 1)
                assert inst.g.n == n + 3 * m and inst.k == m
                gamma = gamma_exact(g, n)
                gamma_sub = gamma_exact(inst.g, n + m)
                for k in range(n + 1):
                    assert (gamma <= k) == (gamma_sub is not None and gamma_sub <= k + m)
                graphs += 1
    elapsed = time.perf_counter() - started
    print(f"criterion 6: {graphs} labelled graphs in {elapsed:.1f}s")
    assert elapsed < 120


# -- 7 ---------------------------------------------------------------------------

@criterion(7, "degree-2 subdivision certificates")
def test_c07_vcds_certificates():
    rng = random.Random(707)
    for i in range(100):
        g = random_graph(rng, rng.randint(1, 7), rng.choice((0.25, 0.4, 0.6)))
        if i % 2:
            cover = vertex_cover_number(g)[1]
        else:
            # a non-minimum cover: one endpoint per edge chosen at random
            cover = sorted({rng.choice(e) for e in g.edges})
        inst = reduce_vc_ds_deg2(g, 0, cover)
        assert inst.modulator == tuple(cover)
        assert degeneracy(inst.g)[0] <= 2
        assert elimination_width(inst.g, inst.certificates["elimination_order"]) <= 2
        assert is_c_modulator(inst.g, cover, 3)
        rest = [v for v in range(inst.g.n) if v not in set(cover)]
        h, _ = induced_subgraph(inst.g, rest)
        td = td_function(h.n, h.edges)
        assert all(td(comp) <= 3 for comp in components(h) if len(comp) <= 16)


# -- 8 ---------------------------------------------------------------------------

def _batch(rng: random.Random):
    t, n, m = rng.randint(1, 3), rng.randint(1, 4), rng.randint(1, 4)
    formulas = []
    force_unsat = rng.random() < 0.5 and m >= 2
    for _ in range(t):
        clauses = list(random_cnf(rng, n, m))
        if force_unsat:
            v = rng.randint(1, n)
            clauses[0], clauses[1] = (v, v, v), (-v, -v, -v)
        formulas.append(CnfFormula(n, tuple(clauses)))
    return formulas


def _is_star(g: Graph) -> bool:
    return g.m == g.n - 1 and (g.n <= 2 or sum(1 for v in range(g.n) if g.degree(v) > 1) == 1)


@criterion(8, "cross-composition from 3-SAT")
def test_c08_cross_composition():
    rng = random.Random(808)
    started = time.perf_counter()
    outcomes = {True: 0, False: 0}
    for _ in range(200):
        formulas = _batch(rng)
        t, n, m = len(formulas), formulas[0].n_vars, formulas[0].m
        inst = cross_compose_3sat(formulas)
        g, certs = inst.g, inst.certificates
        assert g.n == 3 * n + t * (m + 2) + 1 and inst.k == n + t

        some_sat = any(truth_table_sat(f.n_vars, f.clauses) for f in formulas)
        assert (gamma_exact(g, n + t) is not None) == some_sat
        outcomes[some_sat] += 1

        order = certs["clauses"] + certs["roots"] + certs["ys"] + certs["apex"] + certs["literals"] + certs["triangle_apexes"]
        assert order == certs["elimination_order"]
        assert elimination_width(g, order) <= 4
        assert degeneracy(g)[0] <= 4

        removed = set(certs["literals"]) | set(certs["triangle_apexes"]) | set(certs["apex"])
        h, _ = induced_subgraph(g, [v for v in range(g.n) if v not in removed])
        parts = [induced_subgraph(h, comp)[0] for comp in components(h)]
        assert len(parts) == t
        assert all(_is_star(p) and td_exact(p)[0] <= 2 for p in parts)
    elapsed = time.perf_counter() - started
    print(f"criterion 8: 200 batches ({outcomes[True]} satisfiable, {outcomes[False]} not) in {elapsed:.1f}s")
    assert outcomes[True] >= 20 and outcomes[False] >= 20
    assert elapsed < 300


# -- 9 ---------------------------------------------------------------------------

@criterion(9, "hyperedge-to-graph gadget")
def test_c09_gadget():
    example = AnnotatedInstance(Graph(5, ()), tuple(range(5)), ((0, 2, 3),), 2, 0)
    g, kprime = annotated_to_plain(example)
    assert g.n == 30 and kprime == example.k + 10

    rng = random.Random(909)
    for _ in range(220):
        n = rng.randint(1, 4)
        hyper = tuple(tuple(rng.sample(range(n), rng.randint(1, n))) for _ in range(rng.randint(0, 2)))
        inst = AnnotatedInstance(Graph(n, ()), tuple(range(n)), hyper, rng.randint(0, n + 1), 0)
        g, kprime = annotated_to_plain(inst)
        alpha_plain = alpha_bnb(g)[0]
        if g.n <= 24:
            assert alpha_plain == brute_alpha(g.n, g.edges)
        assert (alpha_plain >= kprime) == (brute_alpha_annotated(inst) >= inst.k)


# -- 10 --------------------------------------------------------------------------

@criterion(10, "treedepth engine on paths, cliques and certificates")
def test_c10_treedepth_engine():
    for n in range(0, 17):
        g = Graph(n, tuple((i, i + 1) for i in range(n - 1)))
        value, d = td_exact(g)
        assert value == math.ceil(math.log2(n + 1)) == td_function(g.n, g.edges)(range(n))
        assert verify_decomposition(g, d)
    for n in range(0, 9):
        g = Graph(n, tuple(itertools.combinations(range(n), 2)))
        value, d = td_exact(g)
        assert value == n == td_function(g.n, g.edges)(range(n))
        assert verify_decomposition(g, d)
    rng = random.Random(1010)
    for _ in range(60):
        g = random_graph(rng, rng.randint(1, 11), rng.choice((0.2, 0.4, 0.6)))
        value, d = td_exact(g)
        assert value == td_function(g.n, g.edges)(range(g.n))
        assert verify_decomposition(g, d)


# -- 11 --------------------------------------------------------------------------

@criterion(11, "modulator quality: exact minimum, greedy valid within 2^c")
def test_c11_modulator_quality():
    rng = random.Random(1111)
    worst = 0.0
    for _ in range(90):
        n = rng.randint(1, 10)
        g = random_graph(rng, n, rng.choice((0.25, 0.4, 0.6)))
        c = rng.randint(1, 3)
        td = td_function(g.n, g.edges)
        exact = compute_modulator(g, c, "exact")
        greedy = compute_modulator(g, c, "greedy")
        best = brute_min_modulator(g.n, g.edges, c)
        assert len(exact.x) == best
        for mod in (exact, greedy):
            assert is_c_modulator(g, mod.x, c)
            assert td(set(range(n)) - set(mod.x)) <= c
        assert len(greedy.x) <= 2**c * best
        if best:
            worst = max(worst, len(greedy.x) / best)
    print(f"criterion 11: worst greedy/exact ratio {worst:.2f}")


# -- 12 --------------------------------------------------------------------------

@criterion(12, "determinism and round-trip")
def test_c12_determinism():
    rng = random.Random(1212)
    for _ in range(40):
        n = rng.randint(1, 12)
        c = rng.randint(1, 3)
        g, _ = planted_graph(rng, n, c, rng.randint(0, min(4, n)))
        k = rng.randint(0, n)
        runs = []
        for _ in range(2):
            gker, kker, report = full_pipeline(g, k, c)
            runs.append((serialize_instance(LabeledInstance(gker, kker)), emit_report(report.trace, report.sizes(), None)))
        assert runs[0] == runs[1]


@criterion(12, "determinism and round-trip")
def test_c12_round_trip():
    rng = random.Random(1213)
    for i in range(500):
        if i % 2:
            obj = random_annotated(rng)
        else:
            g = random_graph(rng, rng.randint(0, 14), 0.3)
            mod = tuple(sorted(rng.sample(range(g.n), rng.randint(0, g.n))))
            obj = LabeledInstance(g, rng.randint(0, 6), {"modulator": mod} if mod else {}, {}, rng.randint(0, 3))
        text = serialize_instance(obj)
        again = parse_instance(text)
        assert serialize_instance(again) == text
        if isinstance(obj, AnnotatedInstance):
            assert again == obj and alpha_annotated(again)[0] == alpha_annotated(obj)[0]
        else:
            assert (again.g, again.k, again.c, again.modulator) == (obj.g, obj.k, obj.c, obj.modulator)
