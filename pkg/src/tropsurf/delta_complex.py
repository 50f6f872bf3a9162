"""Two-dimensional Delta-complexes with explicit slot-level gluing data.

A complex is given by named vertices, edges, and triangular facets.
Edges carry two endpoint *slots* (0 and 1) which stay distinct even when
both endpoints are the same vertex, so self-glued edges are supported.
Facet side ``i`` sits opposite corner ``i`` and joins corners ``(i+1) % 3``
and ``(i+2) % 3``; ``flip=False`` attaches corner ``(i+1) % 3`` to edge
slot 0, ``flip=True`` swaps the two slots.

The text format (UTF-8, ``#`` comments, whitespace tokens)::

    complex 2
    vertex <name>
    edge <name> <vertex0> <vertex1>
    facet <name> corners <c0> <c1> <c2> sides <e0>[:flip] <e1>[:flip] <e2>[:flip]
    alpha <edge> <slot> <integer>        # optional structure constants

Identifier order in the file fixes every row/column order downstream;
nothing is re-sorted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import ParseError, ValidationError

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Incidence(NamedTuple):
    """One endpoint slot of an edge; there are exactly 2E of these."""

    edge: str
    slot: int


@dataclass(frozen=True)
class EdgeRecord:
    name: str
    endpoints: tuple[str, str]  # may coincide (self-glued edge)


@dataclass(frozen=True)
class FacetSide:
    edge: str
    flip: bool

    def slot_of_role(self, role: int) -> int:
        # role 0 = corner (i+1)%3, role 1 = corner (i+2)%3 of side i
        return role ^ int(self.flip)


@dataclass(frozen=True)
class FacetRecord:
    name: str
    corners: tuple[str, str, str]
    sides: tuple[FacetSide, FacetSide, FacetSide]


@dataclass(frozen=True)
class VertexLink:
    """The link graph of a vertex.

    ``nodes`` lists the incidences whose endpoint is the vertex, in
    (edge file order, slot) order.  ``link_edges`` holds one unordered
    node-index pair per facet corner at the vertex; a pair (t, t) is a
    loop, counted once here.
    """

    vertex: str
    nodes: tuple[Incidence, ...]
    link_edges: tuple[tuple[int, int], ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.link_edges)

    def is_connected(self) -> bool:
        n = len(self.nodes)
        if n == 0:
            return True
        adj: list[set[int]] = [set() for _ in range(n)]
        for s, t in self.link_edges:
            adj[s].add(t)
            adj[t].add(s)
        seen = {0}
        stack = [0]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == n

    def is_cycle(self) -> bool:
        """True when the link is a single closed cycle (manifold point)."""
        if not self.nodes or len(self.link_edges) != len(self.nodes):
            return False
        degree = [0] * len(self.nodes)
        for s, t in self.link_edges:
            degree[s] += 1
            degree[t] += 1  # a loop contributes 2 to its node
        return self.is_connected() and all(d == 2 for d in degree)


@dataclass(frozen=True)
class EdgeLink:
    edge: str
    entries: tuple[tuple[str, int], ...]  # (facet, opposite-corner index)

    @property
    def degree(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DeltaComplex:
    vertices: tuple[str, ...]
    edges: tuple[EdgeRecord, ...]
    facets: tuple[FacetRecord, ...]

    def __post_init__(self):
        _validate(self)

    # -- index helpers ----------------------------------------------------

    @cached_property
    def edge_by_name(self) -> dict[str, EdgeRecord]:
        return {e.name: e for e in self.edges}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.name: i for i, e in enumerate(self.edges)}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def incidences(self) -> list[Incidence]:
        """All 2E incidences in (edge file order, slot) order."""
        return [Incidence(e.name, s) for e in self.edges for s in (0, 1)]

    def incidence_vertex(self, inc: Incidence) -> str:
        return self.edge_by_name[inc.edge].endpoints[inc.slot]

    # -- links ------------------------------------------------------------

    def corner_incidence(self, facet: FacetRecord, side_index: int, role: int) -> Incidence:
        side = facet.sides[side_index]
        return Incidence(side.edge, side.slot_of_role(role))

    @cached_property
    def _links(self) -> dict[str, VertexLink]:
        nodes: dict[str, list[Incidence]] = {v: [] for v in self.vertices}
        for inc in self.incidences():
            nodes[self.incidence_vertex(inc)].append(inc)
        node_pos = {
            (v, inc): i for v, incs in nodes.items() for i, inc in enumerate(incs)
        }
        link_edges: dict[str, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for facet in self.facets:
            for j, corner in enumerate(facet.corners):
                # the two sides through corner j, with j's role in each
                a = self.corner_incidence(facet, (j + 1) % 3, 1)
                b = self.corner_incidence(facet, (j + 2) % 3, 0)
                s, t = node_pos[(corner, a)], node_pos[(corner, b)]
                link_edges[corner].append((min(s, t), max(s, t)))
        return {
            v: VertexLink(v, tuple(nodes[v]), tuple(link_edges[v]))
            for v in self.vertices
        }

    def vertex_link(self, vertex: str) -> VertexLink:
        try:
            return self._links[vertex]
        except KeyError:
            raise ValidationError(f"unknown vertex {vertex!r}") from None

    def edge_link(self, edge: str) -> EdgeLink:
        if edge not in self.edge_by_name:
            raise ValidationError(f"unknown edge {edge!r}")
        entries = []
        for facet in self.facets:
            for i, side in enumerate(facet.sides):
                if side.edge == edge:
                    entries.append((facet.name, i))
        return EdgeLink(edge, tuple(entries))

    def edge_degree(self, edge: str) -> int:
        return self._edge_degrees[edge]

    @cached_property
    def _edge_degrees(self) -> dict[str, int]:
        deg = {e.name: 0 for e in self.edges}
        for facet in self.facets:
            for side in facet.sides:
                deg[side.edge] += 1
        return deg

    # -- global invariants --------------------------------------------------

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.facets)

    def locally_connected_codim1(self) -> tuple[dict[str, bool], bool]:
        per_vertex = {v: self.vertex_link(v).is_connected() for v in self.vertices}
        return per_vertex, all(per_vertex.values())

    def boundary_matrices(self) -> tuple[list[list[int]], list[list[int]]]:
        """(d1, d2) with d1 of shape V x E and d2 of shape E x F.

        d1 sends an edge to endpoint[1] - endpoint[0].  d2 sends a facet
        to the signed sum of its side edges, the sign being +1 when the
        edge's slot0 -> slot1 orientation agrees with the traversal
        corner (i+1) -> corner (i+2) (i.e. flip=False) and -1 otherwise.
        The composition d1 * d2 is zero.
        """
        v_idx, e_idx = self.vertex_index, self.edge_index
        d1 = [[0] * len(self.edges) for _ in self.vertices]
        for j, e in enumerate(self.edges):
            d1[v_idx[e.endpoints[0]]][j] -= 1
            d1[v_idx[e.endpoints[1]]][j] += 1
        d2 = [[0] * len(self.facets) for _ in self.edges]
        for j, facet in enumerate(self.facets):
            for side in facet.sides:
                d2[e_idx[side.edge]][j] += -1 if side.flip else 1
        return d1, d2

    # -- serialization ------------------------------------------------------

    def serialize(self, alpha: dict[Incidence, int] | None = None) -> str:
        lines = ["complex 2"]
        lines += [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {e.name} {e.endpoints[0]} {e.endpoints[1]}" for e in self.edges]
        for f in self.facets:
            sides = " ".join(
                s.edge + (":flip" if s.flip else "") for s in f.sides)
            lines.append(
                f"facet {f.name} corners {' '.join(f.corners)} sides {sides}")
        if alpha is not None:
            for e in self.edges:
                for s in (0, 1):
                    lines.append(f"alpha {e.name} {s} {alpha[Incidence(e.name, s)]}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation

def _validate(cx: DeltaComplex) -> None:
    if not cx.vertices:
        raise ValidationError("complex has no vertices")
    seen: set[str] = set()
    for name in cx.vertices:
        _check_name(name)
        if name in seen:
            raise ValidationError(f"duplicate name {name!r}")
        seen.add(name)
    vertex_set = set(cx.vertices)
    for e in cx.edges:
        _check_name(e.name)
        if e.name in seen:
            raise ValidationError(f"duplicate name {e.name!r}")
        seen.add(e.name)
        for v in e.endpoints:
            if v not in vertex_set:
                raise ValidationError(f"edge {e.name!r}: unknown vertex {v!r}")
    edge_map = {e.name: e for e in cx.edges}
    for f in cx.facets:
        _check_name(f.name)
        if f.name in seen:
            raise ValidationError(f"duplicate name {f.name!r}")
        seen.add(f.name)
        for v in f.corners:
            if v not in vertex_set:
                raise ValidationError(f"facet {f.name!r}: unknown vertex {v!r}")
        for i, side in enumerate(f.sides):
            edge = edge_map.get(side.edge)
            if edge is None:
                raise ValidationError(f"facet {f.name!r}: unknown edge {side.edge!r}")
            for role, corner_pos in ((0, (i + 1) % 3), (1, (i + 2) % 3)):
                want = f.corners[corner_pos]
                got = edge.endpoints[side.slot_of_role(role)]
                if want != got:
                    raise ValidationError(
                        f"facet {f.name!r} side {i}: corner {want!r} does not match "
                        f"edge {side.edge!r} endpoint {got!r}"
                        + (" (flipped)" if side.flip else ""))

    # connectivity over the incidence graph of all cells
    if len(cx.vertices) == 1 and not cx.edges and not cx.facets:
        raise ValidationError("single-point complex is rejected as degenerate")
    ids = {("v", v): i for i, v in enumerate(cx.vertices)}
    for e in cx.edges:
        ids[("e", e.name)] = len(ids)
    for f in cx.facets:
        ids[("f", f.name)] = len(ids)
    parent = list(range(len(ids)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(a, b):
        parent[find(a)] = find(b)

    for e in cx.edges:
        for v in e.endpoints:
            union(ids[("e", e.name)], ids[("v", v)])
    for f in cx.facets:
        fid = ids[("f", f.name)]
        for v in f.corners:
            union(fid, ids[("v", v)])
        for s in f.sides:
            union(fid, ids[("e", s.edge)])
    roots = {find(i) for i in range(len(ids))}
    if len(roots) > 1:
        raise ValidationError("complex is not connected")

    # isolated vertices are unreachable from any cell, hence already caught
    # by connectivity whenever V > 1; the single-point case was rejected above.


def _check_name(name: str) -> None:
    if not _NAME_RE.match(name):
        raise ValidationError(f"bad identifier {name!r}")


# ---------------------------------------------------------------------------
# parsing

def _tokenize(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_complex_with_alpha(text: str) -> tuple[DeltaComplex, dict[Incidence, int]]:
    """Parse a complex file, returning the complex and any alpha lines."""
    vertices: list[str] = []
    edges: list[EdgeRecord] = []
    facets: list[FacetRecord] = []
    alpha: dict[Incidence, int] = {}
    saw_header = False
    for lineno, tokens in _tokenize(text):
        kind, args = tokens[0], tokens[1:]
        if kind == "complex":
            if args != ["2"]:
                raise ParseError("expected 'complex 2'", lineno)
            saw_header = True
        elif kind == "vertex":
            if len(args) != 1:
                raise ParseError("vertex takes one name", lineno)
            vertices.append(args[0])
        elif kind == "edge":
            if len(args) != 3:
                raise ParseError("edge takes name and two vertices", lineno)
            edges.append(EdgeRecord(args[0], (args[1], args[2])))
        elif kind == "facet":
            facets.append(_parse_facet(args, lineno))
        elif kind == "alpha":
            if len(args) != 3:
                raise ParseError("alpha takes edge, slot, integer", lineno)
            if args[1] not in ("0", "1"):
                raise ParseError("alpha slot must be 0 or 1", lineno)
            try:
                value = int(args[2])
            except ValueError:
                raise ParseError(f"bad integer {args[2]!r}", lineno) from None
            key = Incidence(args[0], int(args[1]))
            if key in alpha:
                raise ParseError(f"duplicate alpha for {args[0]} slot {args[1]}", lineno)
            alpha[key] = value
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    if not saw_header:
        raise ParseError("missing 'complex 2' header")
    cx = DeltaComplex(tuple(vertices), tuple(edges), tuple(facets))
    for inc in alpha:
        if inc.edge not in cx.edge_by_name:
            raise ValidationError(f"alpha references unknown edge {inc.edge!r}")
    return cx, alpha


def parse_complex(text: str) -> DeltaComplex:
    """Parse and validate a complex file (alpha lines allowed, ignored)."""
    return parse_complex_with_alpha(text)[0]


def _parse_facet(args: list[str], lineno: int) -> FacetRecord:
    if (len(args) != 9 or args[1] != "corners" or args[5] != "sides"):
        raise ParseError(
            "facet syntax: facet <name> corners <c0> <c1> <c2> "
            "sides <e0>[:flip] <e1>[:flip] <e2>[:flip]", lineno)
    sides = []
    for spec in args[6:9]:
        if spec.endswith(":flip"):
            sides.append(FacetSide(spec[:-5], True))
        elif ":" in spec:
            raise ParseError(f"bad side spec {spec!r}", lineno)
        else:
            sides.append(FacetSide(spec, False))
    return FacetRecord(args[0], (args[2], args[3], args[4]),
                       (sides[0], sides[1], sides[2]))
