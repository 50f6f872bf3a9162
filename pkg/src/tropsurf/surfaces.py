"""Weak tropical surfaces: structure constants and intersection matrices.

A weak tropical surface is a connected 2-dimensional Delta-complex plus
one integer per edge-endpoint incidence, subject to the balancing axiom

    alpha(e, 0) + alpha(e, 1) = deg(e)            for every edge e,

where deg(e) counts the facet sides attached to e.  The surface is
*tropical* when every local intersection matrix has exactly one positive
eigenvalue.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .delta_complex import (DeltaComplex, EdgeRecord, FacetRecord, FacetSide,
                            Incidence, parse_complex_with_alpha)
from .errors import ValidationError
from .exact_linalg import Inertia, inertia


@dataclass(frozen=True)
class WeakTropicalSurface:
    complex: DeltaComplex
    alpha: Mapping[Incidence, int]

    def __post_init__(self):
        object.__setattr__(self, "alpha", dict(self.alpha))
        violations = eq1_violations(self.complex, self.alpha)
        if violations:
            detail = "; ".join(
                f"edge {e}: alpha {a0}+{a1} != deg {d}" for e, a0, a1, d in violations)
            raise ValidationError(f"structure constants violate the edge axiom: {detail}")

    def serialize(self) -> str:
        return self.complex.serialize(alpha=dict(self.alpha))

    @cached_property
    def global_index(self) -> tuple[Incidence, ...]:
        """Incidences grouped per vertex (vertex file order, link-node order)."""
        order: list[Incidence] = []
        for v in self.complex.vertices:
            order.extend(self.complex.vertex_link(v).nodes)
        return tuple(order)

    @cached_property
    def global_position(self) -> dict[Incidence, int]:
        return {inc: i for i, inc in enumerate(self.global_index)}


def eq1_violations(cx: DeltaComplex, alpha: Mapping[Incidence, int]):
    missing = [inc for inc in cx.incidences() if inc not in alpha]
    if missing:
        raise ValidationError(
            "missing alpha values for: "
            + ", ".join(f"({i.edge},{i.slot})" for i in missing))
    bad = []
    for e in cx.edges:
        a0, a1 = alpha[Incidence(e.name, 0)], alpha[Incidence(e.name, 1)]
        d = cx.edge_degree(e.name)
        if a0 + a1 != d:
            bad.append((e.name, a0, a1, d))
    return bad


def attach_alpha(cx: DeltaComplex, alpha: Mapping[Incidence, int]) -> WeakTropicalSurface:
    """Validate raw structure constants against the edge axiom."""
    return WeakTropicalSurface(cx, alpha)


def parse_surface(text: str) -> WeakTropicalSurface:
    """Parse a complex file whose alpha lines must be complete."""
    cx, alpha = parse_complex_with_alpha(text)
    return attach_alpha(cx, alpha)


# ---------------------------------------------------------------------------
# intersection matrices

@dataclass(frozen=True)
class LocalMatrix:
    vertex: str
    index: tuple[Incidence, ...]
    matrix: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class GlobalMatrix:
    index: tuple[Incidence, ...]
    matrix: tuple[tuple[int, ...], ...]


def local_matrix(surface: WeakTropicalSurface, vertex: str) -> LocalMatrix:
    """The symmetric matrix turning local slopes into divisor coefficients.

    Rows/columns follow the vertex link's node order.  The off-diagonal
    entry (t, u) counts link edges between the nodes; the diagonal at a
    node (e, s) is -alpha(e, 1-s) plus twice the number of link loops at
    the node.
    """
    link = surface.complex.vertex_link(vertex)
    n = len(link.nodes)
    m = [[0] * n for _ in range(n)]
    for s, t in link.link_edges:
        if s == t:
            m[s][s] += 2
        else:
            m[s][t] += 1
            m[t][s] += 1
    for i, (edge, slot) in enumerate(link.nodes):
        m[i][i] += -surface.alpha[Incidence(edge, 1 - slot)]
    return LocalMatrix(vertex, link.nodes, tuple(tuple(r) for r in m))


def global_matrix(surface: WeakTropicalSurface) -> GlobalMatrix:
    """Block-diagonal assembly of all local matrices, size N = 2E."""
    index = surface.global_index
    n = len(index)
    pos = surface.global_position
    m = [[0] * n for _ in range(n)]
    for v in surface.complex.vertices:
        local = local_matrix(surface, v)
        offsets = [pos[inc] for inc in local.index]
        for i, gi in enumerate(offsets):
            for j, gj in enumerate(offsets):
                m[gi][gj] = local.matrix[i][j]
    return GlobalMatrix(index, tuple(tuple(r) for r in m))


@dataclass(frozen=True)
class Classification:
    tropical: bool
    per_vertex: tuple[tuple[str, Inertia], ...]


def classify(surface: WeakTropicalSurface) -> Classification:
    """Tropical iff every local matrix has exactly one positive eigenvalue."""
    report = []
    for v in surface.complex.vertices:
        sig = inertia(local_matrix(surface, v).matrix)
        report.append((v, sig))
    return Classification(all(s.positive == 1 for _, s in report), tuple(report))


# ---------------------------------------------------------------------------
# deterministic fuzzing harness

def random_weak_surface(seed: int, n_facets: int) -> WeakTropicalSurface:
    """Deterministic-per-seed random connected surface.

    n_facets triangles are glued pairwise along sides: first a spanning
    tree of gluings keeps the result connected, then leftover sides are
    paired at random (sides of the same facet are never glued to each
    other, so n_facets = 1 always yields the lone triangle).  Unglued
    sides remain boundary edges.  alpha(e, 0) is drawn uniformly from
    [-2, deg(e) + 2] and alpha(e, 1) = deg(e) - alpha(e, 0).
    """
    if n_facets < 1:
        raise ValidationError("need at least one facet")
    rng = random.Random(seed)

    # union-find over facet corners (f, c)
    parent: dict[tuple[int, int], tuple[int, int]] = {
        (f, c): (f, c) for f in range(n_facets) for c in range(3)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    glued: dict[tuple[int, int], tuple[tuple[int, int], bool]] = {}

    def glue(s1, s2, crossed):
        glued[s1] = (s2, crossed)
        glued[s2] = (s1, crossed)
        f, i = s1
        g, j = s2
        if crossed:
            union((f, (i + 1) % 3), (g, (j + 2) % 3))
            union((f, (i + 2) % 3), (g, (j + 1) % 3))
        else:
            union((f, (i + 1) % 3), (g, (j + 1) % 3))
            union((f, (i + 2) % 3), (g, (j + 2) % 3))

    # spanning-tree phase: facet f attaches to a free side of an earlier facet
    for f in range(1, n_facets):
        candidates = [(g, j) for g in range(f) for j in range(3)
                      if (g, j) not in glued]
        target = rng.choice(candidates)
        glue(target, (f, rng.randrange(3)), rng.random() < 0.5)

    # extra random pairings among the remaining free sides
    free = [(f, i) for f in range(n_facets) for i in range(3)
            if (f, i) not in glued]
    rng.shuffle(free)
    while len(free) >= 2:
        s1 = free.pop()
        if rng.random() < 0.5:
            continue
        partners = [s for s in free if s[0] != s1[0]]
        if not partners:
            continue
        s2 = rng.choice(partners)
        free.remove(s2)
        glue(s1, s2, rng.random() < 0.5)

    # name quotient vertices by their smallest corner representative
    classes: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for corner in sorted(parent):
        classes.setdefault(find(corner), []).append(corner)
    vertex_name = {}
    names = []
    for k, (root, members) in enumerate(
            sorted(classes.items(), key=lambda kv: min(kv[1]))):
        name = f"v{k}"
        names.append(name)
        for c in members:
            vertex_name[c] = name

    # one edge per glued pair (owned by the smaller side) or free side
    edge_of_side: dict[tuple[int, int], tuple[str, bool]] = {}
    edges = []
    for f in range(n_facets):
        for i in range(3):
            side = (f, i)
            if side in glued:
                other, crossed = glued[side]
                if other < side:
                    name, _ = edge_of_side[other]
                    edge_of_side[side] = (name, crossed)
                    continue
            name = f"e{len(edges)}"
            edge_of_side[side] = (name, False)
            edges.append(EdgeRecord(name, (vertex_name[(f, (i + 1) % 3)],
                                           vertex_name[(f, (i + 2) % 3)])))

    facets = []
    for f in range(n_facets):
        corners = tuple(vertex_name[(f, c)] for c in range(3))
        sides = tuple(FacetSide(*edge_of_side[(f, i)]) for i in range(3))
        facets.append(FacetRecord(f"f{f}", corners, sides))

    cx = DeltaComplex(tuple(names), tuple(edges), tuple(facets))
    alpha = {}
    for e in cx.edges:
        d = cx.edge_degree(e.name)
        a0 = rng.randint(-2, d + 2)
        alpha[Incidence(e.name, 0)] = a0
        alpha[Incidence(e.name, 1)] = d - a0
    return attach_alpha(cx, alpha)
