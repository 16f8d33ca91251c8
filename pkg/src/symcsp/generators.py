"""Seeded random instance generators for the verification batches.

Instances are generated promise-first: the proposal is a bounded mutation
of the satisfied set of a concrete assignment (or, for cut instances, of a
partition realizing the global optimum), so the distance promise holds by
construction and is re-confirmed by the oracle in the test harness.
"""

from __future__ import annotations

import random
from itertools import combinations

from .core import (
    Clause,
    Instance,
    ProposedSolution,
    SymmetricLanguage,
    and_language,
    satisfied_set,
)
from .cut_solver import CutEdge, CutGraph, CutInstance, satisfied_edges
from .oracle import brute_force_cut

AE2 = SymmetricLanguage(2, frozenset({0, 2}))


def gen_and_instance(
    seed: int,
    max_vars: int = 10,
    max_clauses: int = 12,
    max_arity: int = 3,
    max_k: int = 4,
):
    """Mixed-arity conjunction instance with a construction-time promise."""
    rng = random.Random(seed)
    n = rng.randint(2, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for i in range(m):
        r = rng.randint(1, min(max_arity, n))
        scope = tuple(rng.sample(range(n), r))
        neg = tuple(rng.randint(0, 1) for _ in range(r))
        clauses.append(Clause(i, neg, scope, and_language(r)))
    inst = Instance(n, tuple(clauses))
    k = rng.randint(0, max_k)
    anchor = tuple(rng.randint(0, 1) for _ in range(n))
    p = set(satisfied_set(inst, anchor))
    for cid in rng.sample(range(m), min(m, rng.randint(0, k))):
        p ^= {cid}
    return inst, ProposedSolution(frozenset(p), k)


def _random_connected_graph(rng, n, extra, loop_prob=0.05):
    edges = []
    order = list(range(1, n))
    rng.shuffle(order)
    for v in order:
        u = rng.randrange(0, v)
        edges.append(CutEdge(len(edges), u, v, rng.randint(0, 1)))
    for _ in range(extra):
        if n > 1 and rng.random() >= loop_prob:
            u, v = rng.sample(range(n), 2)
        else:
            u = v = rng.randrange(n)
        edges.append(CutEdge(len(edges), u, v, rng.randint(0, 1)))
    return CutGraph(n, tuple(edges))


def _dumbbell_graph(rng, n1, n2, bridges):
    """Two dense blobs joined by few edges: these admit balanced cuts at
    small q, exercising the contraction recursion."""
    edges = []

    def blob(vs):
        for i in range(len(vs)):
            edges.append(
                CutEdge(len(edges), vs[i], vs[(i + 1) % len(vs)], rng.randint(0, 1))
            )
        pairs = list(combinations(vs, 2))
        rng.shuffle(pairs)
        for u, v in pairs[: len(vs)]:
            edges.append(CutEdge(len(edges), u, v, rng.randint(0, 1)))
        for _ in range(5):
            u, v = rng.sample(vs, 2)
            edges.append(CutEdge(len(edges), u, v, rng.randint(0, 1)))

    a = list(range(n1))
    b = list(range(n1, n1 + n2))
    blob(a)
    blob(b)
    for _ in range(bridges):
        edges.append(CutEdge(len(edges), rng.choice(a), rng.choice(b), rng.randint(0, 1)))
    return CutGraph(n1 + n2, tuple(edges))


def gen_cut_instance(
    seed: int,
    max_vertices: int = 10,
    max_k: int = 3,
    dumbbell_prob: float = 0.35,
):
    """Connected cut-improvement instance whose proposal is a bounded
    mutation of a global optimum's satisfied set (retrying mutations until
    some optimum stays within distance k)."""
    rng = random.Random(seed)
    k = rng.randint(0, max_k)
    if rng.random() < dumbbell_prob and max_vertices >= 8:
        g = _dumbbell_graph(rng, rng.randint(4, max_vertices // 2), rng.randint(4, max_vertices // 2), rng.randint(1, max(1, k)))
    else:
        n = rng.randint(3, max_vertices)
        g = _random_connected_graph(rng, n, rng.randint(0, n + 6))
    triples = [(e.id, e.u, e.v) for e in g.edges]
    types = [e.etype for e in g.edges]
    base = brute_force_cut(g.num_vertices, triples, types, frozenset(), 10 ** 9)
    anchor = set(satisfied_edges(g, base.global_witness[0]))
    ids = [e.id for e in g.edges]
    while True:
        p = set(anchor)
        for eid in rng.sample(ids, min(len(ids), rng.randint(0, k))):
            p ^= {eid}
        rep = brute_force_cut(g.num_vertices, triples, types, frozenset(p), k)
        if rep.promise_holds and rep.neighborhood_value == rep.global_value:
            return CutInstance(g, frozenset(p), k)


def cut_to_csp(ci: CutInstance):
    """Graph-form instance as a homogeneous two-variable all-equal CSP."""
    clauses = []
    for e in sorted(ci.graph.edges, key=lambda e: e.id):
        neg = (0, 0) if e.etype == 0 else (0, 1)
        clauses.append(Clause(e.id, neg, (e.u, e.v), AE2))
    inst = Instance(ci.graph.num_vertices, tuple(clauses))
    return inst, ProposedSolution(ci.p_ids, ci.k)


def gen_2ae_instance(seed: int, max_vertices: int = 10, max_k: int = 3):
    """Homogeneous equality/inequality CSP instance with the cut promise."""
    return cut_to_csp(gen_cut_instance(seed, max_vertices, max_k))
