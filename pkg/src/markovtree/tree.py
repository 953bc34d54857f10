"""Finite metric trees with exact rational edge lengths.

A :class:`MetricTree` is an immutable combinatorial tree: named vertices,
named edges ``u -- v`` and a positive :class:`~fractions.Fraction` length per
edge.  Vertices of degree 2 are allowed and never smoothed away implicitly.

Points of a tree are either a vertex (:class:`VertexPoint`) or an interior
point of an edge (:class:`EdgePoint`), the latter measured from the edge's
``u`` end.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union


class TreeError(ValueError):
    """Invalid tree description or query."""


def as_length(value) -> Fraction:
    """Parse an edge length given as int, Fraction or a ``"p/q"`` string."""
    if isinstance(value, float):
        raise TreeError(f"lengths must be exact, got float {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise TreeError(f"bad length {value!r}") from exc


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    def other(self, w: str) -> str:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise TreeError(f"vertex {w!r} is not on edge {self.id!r}")


@dataclass(frozen=True)
class VertexPoint:
    vertex: str


@dataclass(frozen=True)
class EdgePoint:
    """Interior point of ``edge`` at distance ``offset`` from the edge's ``u`` end."""

    edge: str
    offset: Fraction


TreePoint = Union[VertexPoint, EdgePoint]


@dataclass(frozen=True)
class Segment:
    """Part of an edge traversed from offset ``start`` to offset ``end``."""

    edge: str
    start: Fraction
    end: Fraction

    @property
    def length(self) -> Fraction:
        return abs(self.end - self.start)

    @property
    def forward(self) -> bool:
        return self.end > self.start


@dataclass(frozen=True)
class Geodesic:
    segments: tuple[Segment, ...]

    @property
    def length(self) -> Fraction:
        return sum((s.length for s in self.segments), Fraction(0))

    @property
    def edges(self) -> tuple[str, ...]:
        return tuple(s.edge for s in self.segments)


@dataclass(frozen=True)
class PointClass:
    endpoints: frozenset[str]
    branch_points: frozenset[str]
    orders: Mapping[str, int]


class MetricTree:
    """Immutable finite tree with rational edge lengths.

    Vertex and edge order is preserved from construction; it defines the
    indexing of edges (basic arcs) everywhere else in the package.
    """

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge]):
        self._vertices = tuple(vertices)
        self._edges = tuple(edges)
        self._validate()
        self._vertex_index = {v: i for i, v in enumerate(self._vertices)}
        self._edge_index = {e.id: i for i, e in enumerate(self._edges)}
        incident: dict[str, list[int]] = {v: [] for v in self._vertices}
        for i, e in enumerate(self._edges):
            incident[e.u].append(i)
            incident[e.v].append(i)
        self._incident = {v: tuple(ix) for v, ix in incident.items()}

    def _validate(self) -> None:
        if not self._vertices:
            raise TreeError("empty tree")
        vset = set(self._vertices)
        if len(vset) != len(self._vertices):
            raise TreeError("duplicate id: vertex")
        eids = [e.id for e in self._edges]
        if len(set(eids)) != len(eids):
            raise TreeError("duplicate id: edge")
        parent = {v: v for v in self._vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self._edges:
            if e.u not in vset or e.v not in vset:
                raise TreeError(f"edge {e.id!r} has an unknown endpoint")
            if not isinstance(e.length, Fraction) or e.length <= 0:
                raise TreeError(f"nonpositive length on edge {e.id!r}")
            ru, rv = find(e.u), find(e.v)
            if ru == rv:
                raise TreeError(f"cycle detected at edge {e.id!r}")
            parent[ru] = rv
        if len(self._edges) != len(self._vertices) - 1:
            raise TreeError("disconnected")

    # ------------------------------------------------------------------ access

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricTree):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"MetricTree({len(self._vertices)} vertices, {len(self._edges)} edges)"

    def edge(self, key: str | int) -> Edge:
        if isinstance(key, int):
            return self._edges[key]
        try:
            return self._edges[self._edge_index[key]]
        except KeyError:
            raise TreeError(f"unknown edge {key!r}") from None

    def edge_index(self, edge_id: str) -> int:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise TreeError(f"unknown edge {edge_id!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def incident(self, v: str) -> tuple[int, ...]:
        """Indices of edges incident to ``v``, in edge order."""
        try:
            return self._incident[v]
        except KeyError:
            raise TreeError(f"unknown vertex {v!r}") from None

    def degree(self, v: str) -> int:
        return len(self.incident(v))

    def neighbors(self, v: str) -> list[str]:
        return [self._edges[i].other(v) for i in self.incident(v)]

    @property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self._edges), Fraction(0))

    def classify(self) -> PointClass:
        orders = {v: self.degree(v) for v in self._vertices}
        return PointClass(
            endpoints=frozenset(v for v, d in orders.items() if d == 1),
            branch_points=frozenset(v for v, d in orders.items() if d >= 3),
            orders=orders,
        )

    @property
    def endpoints(self) -> list[str]:
        return [v for v in self._vertices if self.degree(v) == 1]

    @property
    def branch_points(self) -> list[str]:
        return [v for v in self._vertices if self.degree(v) >= 3]

    # ------------------------------------------------------------------- paths

    @cached_property
    def _rooting(self) -> tuple[dict, dict]:
        root = self._vertices[0]
        parent: dict[str, tuple[str, int] | None] = {root: None}
        depth = {root: 0}
        queue = deque([root])
        while queue:
            w = queue.popleft()
            for i in self._incident[w]:
                x = self._edges[i].other(w)
                if x not in depth:
                    parent[x] = (w, i)
                    depth[x] = depth[w] + 1
                    queue.append(x)
        return parent, depth

    def edge_path(self, a: str, b: str) -> list[tuple[int, bool]]:
        """Edges on the vertex path from ``a`` to ``b`` as ``(index, forward)``.

        ``forward`` is true when the edge is traversed from its ``u`` to its ``v``.
        """
        self.incident(a), self.incident(b)
        parent, depth = self._rooting
        head: list[tuple[int, bool]] = []
        tail: list[tuple[int, bool]] = []
        x, y = a, b
        while depth[x] > depth[y]:
            p, i = parent[x]
            head.append((i, self._edges[i].u == x))
            x = p
        while depth[y] > depth[x]:
            p, i = parent[y]
            tail.append((i, self._edges[i].v == y))
            y = p
        while x != y:
            p, i = parent[x]
            head.append((i, self._edges[i].u == x))
            x = p
            q, j = parent[y]
            tail.append((j, self._edges[j].v == y))
            y = q
        return head + tail[::-1]

    def vertex_path(self, a: str, b: str) -> list[str]:
        out = [a]
        for i, fwd in self.edge_path(a, b):
            e = self._edges[i]
            out.append(e.v if fwd else e.u)
        return out

    def distance(self, a: str, b: str) -> Fraction:
        return sum((self._edges[i].length for i, _ in self.edge_path(a, b)), Fraction(0))

    # ------------------------------------------------------------------ points

    def check_point(self, p: TreePoint) -> TreePoint:
        if isinstance(p, VertexPoint):
            self.incident(p.vertex)
            return p
        if isinstance(p, EdgePoint):
            e = self.edge(p.edge)
            off = Fraction(p.offset)
            if not 0 < off < e.length:
                raise TreeError(
                    f"offset {off} is not strictly inside edge {e.id!r} of length {e.length}"
                )
            return EdgePoint(e.id, off)
        raise TreeError(f"not a tree point: {p!r}")

    def point_at(self, edge_id: str, offset) -> TreePoint:
        """Point at ``offset`` from the ``u`` end of an edge; endpoints become vertices."""
        e = self.edge(edge_id)
        off = Fraction(offset)
        if off == 0:
            return VertexPoint(e.u)
        if off == e.length:
            return VertexPoint(e.v)
        return self.check_point(EdgePoint(e.id, off))

    # ------------------------------------------------------------ derivations

    def relabel(self, vertices: Mapping[str, str] | None = None,
                edges: Mapping[str, str] | None = None) -> "MetricTree":
        vm = dict(vertices or {})
        em = dict(edges or {})
        return MetricTree(
            [vm.get(v, v) for v in self._vertices],
            [Edge(em.get(e.id, e.id), vm.get(e.u, e.u), vm.get(e.v, e.v), e.length)
             for e in self._edges],
        )

    def with_lengths(self, lengths: Mapping[str, Fraction]) -> "MetricTree":
        return MetricTree(
            self._vertices,
            [Edge(e.id, e.u, e.v, as_length(lengths.get(e.id, e.length))) for e in self._edges],
        )

    def subtree(self, edge_ids: Iterable[str]) -> "MetricTree":
        """The subtree spanned by the given edges (must be connected)."""
        chosen = set(edge_ids)
        edges = [e for e in self._edges if e.id in chosen]
        if len(edges) != len(chosen):
            raise TreeError("unknown edge in subtree selection")
        used = {e.u for e in edges} | {e.v for e in edges}
        return MetricTree([v for v in self._vertices if v in used], edges)


# ---------------------------------------------------------------------------
# construction


def build_tree(spec: Mapping) -> MetricTree:
    """Build a tree from ``{"vertices": [...], "edges": [{"id","from","to","len"}]}``."""
    try:
        vertices = [str(v) for v in spec["vertices"]]
        edges = [
            Edge(str(e["id"]), str(e["from"]), str(e["to"]), as_length(e.get("len", 1)))
            for e in spec["edges"]
        ]
    except (KeyError, TypeError) as exc:
        raise TreeError(f"malformed tree description: {exc}") from exc
    for e in edges:
        if e.length <= 0:
            raise TreeError(f"nonpositive length on edge {e.id!r}")
    return MetricTree(vertices, edges)


def make_star(n: int, leg_length=1) -> MetricTree:
    """n-star with hub ``b`` and leaves ``s1..sn``; for n = 2 an arc through ``b``."""
    if n < 2:
        raise TreeError("a star needs n >= 2")
    length = as_length(leg_length)
    leaves = [f"s{i}" for i in range(1, n + 1)]
    return MetricTree(
        ["b", *leaves],
        [Edge(f"e{i}", "b", s, length) for i, s in enumerate(leaves, 1)],
    )


def make_comb(n: int, spacing=1, tooth=1) -> MetricTree:
    """n-comb: spine ``x1..xn`` with a tooth ``xi -- ci`` at every spine vertex.

    The two spine ends have degree 2, so there are n - 2 branch points.
    """
    if n < 2:
        raise TreeError("a comb needs n >= 2")
    gap, tl = as_length(spacing), as_length(tooth)
    spine = [f"x{i}" for i in range(1, n + 1)]
    tips = [f"c{i}" for i in range(1, n + 1)]
    edges = [Edge(f"sp{i}", spine[i - 1], spine[i], gap) for i in range(1, n)]
    edges += [Edge(f"t{i}", spine[i - 1], tips[i - 1], tl) for i in range(1, n + 1)]
    return MetricTree(spine + tips, edges)


def _terminal_edge(tree: MetricTree) -> Edge:
    for e in tree.edges:
        if tree.degree(e.u) == 1 or tree.degree(e.v) == 1:
            return e
    raise TreeError("tree has no terminal edge")


def _attach_at_midpoint(vertices: list[str], edges: list[Edge], target: Edge,
                        mid: str) -> None:
    """Split ``target`` at its midpoint, inserting vertex ``mid`` (in place)."""
    half = target.length / 2
    k = edges.index(target)
    edges[k:k + 1] = [Edge(target.id + "a", target.u, mid, half),
                      Edge(target.id + "b", mid, target.v, half)]
    vertices.append(mid)


def make_ye_tree(signature: Sequence[int], i: int = 0) -> MetricTree:
    """A tree of Ye's class with the given star signature and ``i`` extra free arcs.

    Level 1 is an ``n_1``-star.  Level ``l`` glues ``n_l`` copies of level
    ``l - 1`` to the leaves of an ``n_l``-star; each copy is attached at the
    midpoint of its first terminal edge.  Each extra arc hangs off the
    midpoint of the first terminal edge of the current tree.
    """
    sig = list(signature)
    if not sig or any((not isinstance(x, int)) or x < 2 for x in sig) or i < 0:
        raise TreeError(f"invalid signature {signature!r} / i={i!r}")
    tree = make_star(sig[0])
    for level, nl in enumerate(sig[1:], 2):
        hub = f"h{level}"
        vertices = [hub]
        edges: list[Edge] = []
        for j in range(1, nl + 1):
            pre = f"{j}.{level}/"
            copy = tree.relabel({v: pre + v for v in tree.vertices},
                                {e.id: pre + e.id for e in tree.edges})
            cv, ce = list(copy.vertices), list(copy.edges)
            mid = pre + "m"
            _attach_at_midpoint(cv, ce, _terminal_edge(copy), mid)
            vertices += cv
            edges += ce
            edges.append(Edge(f"{hub}-{j}", hub, mid, Fraction(1)))
        tree = MetricTree(vertices, edges)
    for k in range(1, i + 1):
        cv, ce = list(tree.vertices), list(tree.edges)
        mid = f"y{k}m"
        _attach_at_midpoint(cv, ce, _terminal_edge(tree), mid)
        cv.append(f"y{k}")
        ce.append(Edge(f"f{k}", mid, f"y{k}", Fraction(1)))
        tree = MetricTree(cv, ce)
    return tree


def complete_binary_tree(leaves: int) -> MetricTree:
    """Rooted complete binary tree with ``leaves`` leaves (a power of two >= 2)."""
    if leaves < 2 or leaves & (leaves - 1):
        raise TreeError("leaves must be a power of two >= 2")
    vertices = ["r"]
    edges = []
    level = ["r"]
    while len(level) < leaves:
        nxt = []
        for v in level:
            for side in "01":
                w = v + side
                vertices.append(w)
                edges.append(Edge(f"{v}>{w}", v, w, Fraction(1)))
                nxt.append(w)
        level = nxt
    return MetricTree(vertices, edges)


def random_tree(n_vertices: int, rng: random.Random) -> MetricTree:
    """Random recursive tree: vertex k attaches to a uniformly chosen earlier vertex."""
    if n_vertices < 2:
        raise TreeError("need at least two vertices")
    vertices = [f"v{k}" for k in range(n_vertices)]
    edges = [Edge(f"e{k}", vertices[rng.randrange(k)], vertices[k], Fraction(1))
             for k in range(1, n_vertices)]
    return MetricTree(vertices, edges)


# ---------------------------------------------------------------------------
# point queries


def _anchors(tree: MetricTree, p: TreePoint) -> list[tuple[str, Segment | None]]:
    """Ways to leave ``p`` towards a vertex: ``(vertex, segment from p to it)``."""
    if isinstance(p, VertexPoint):
        return [(p.vertex, None)]
    e = tree.edge(p.edge)
    return [(e.u, Segment(e.id, p.offset, Fraction(0))),
            (e.v, Segment(e.id, p.offset, e.length))]


def _seg_length(s: Segment | None) -> Fraction:
    return Fraction(0) if s is None else s.length


def geodesic(tree: MetricTree, a: TreePoint, b: TreePoint) -> Geodesic:
    """The unique arc from ``a`` to ``b`` as oriented edge segments."""
    a, b = tree.check_point(a), tree.check_point(b)
    if a == b:
        raise TreeError("coincident points")
    if isinstance(a, EdgePoint) and isinstance(b, EdgePoint) and a.edge == b.edge:
        return Geodesic((Segment(a.edge, a.offset, b.offset),))
    best = None
    for va, sa in _anchors(tree, a):
        for vb, sb in _anchors(tree, b):
            path = tree.edge_path(va, vb)
            total = _seg_length(sa) + _seg_length(sb) + sum(
                (tree.edges[i].length for i, _ in path), Fraction(0))
            if best is None or total < best[0]:
                best = (total, sa, path, sb)
    _, sa, path, sb = best
    segs = [] if sa is None else [sa]
    for i, fwd in path:
        e = tree.edges[i]
        segs.append(Segment(e.id, Fraction(0), e.length) if fwd
                    else Segment(e.id, e.length, Fraction(0)))
    if sb is not None:
        segs.append(Segment(sb.edge, sb.end, sb.start))
    return Geodesic(tuple(s for s in segs if s.length > 0))


@dataclass(frozen=True)
class Subdivision:
    tree: MetricTree
    points: Mapping[TreePoint, str]      # every input point -> vertex id in ``tree``
    edges: Mapping[str, tuple[str, ...]]  # old edge id -> new edge ids, u to v


def subdivide_at(tree: MetricTree, points: Iterable[TreePoint],
                 names: Mapping[TreePoint, str] | None = None) -> Subdivision:
    """Turn interior points into degree-2 vertices, preserving lengths additively.

    New vertices are named by ``names`` when given, otherwise ``"<edge>@<offset>"``.
    Vertex points map to themselves.
    """
    names = dict(names or {})
    pts = [tree.check_point(p) for p in points]
    by_edge: dict[str, set[Fraction]] = {}
    for p in pts:
        if isinstance(p, EdgePoint):
            by_edge.setdefault(p.edge, set()).add(p.offset)
    taken = set(tree.vertices)
    mapping: dict[TreePoint, str] = {}
    for p in pts:
        if isinstance(p, VertexPoint):
            mapping[p] = p.vertex
    new_vertices = list(tree.vertices)
    new_edges: list[Edge] = []
    edge_map: dict[str, tuple[str, ...]] = {}
    for e in tree.edges:
        offs = sorted(by_edge.get(e.id, ()))
        if not offs:
            new_edges.append(e)
            edge_map[e.id] = (e.id,)
            continue
        chain = [e.u]
        for off in offs:
            p = EdgePoint(e.id, off)
            name = names.get(p, f"{e.id}@{off}")
            if name in taken:
                raise TreeError(f"duplicate id: vertex {name!r}")
            taken.add(name)
            mapping[p] = name
            chain.append(name)
            new_vertices.append(name)
        chain.append(e.v)
        cuts = [Fraction(0), *offs, e.length]
        pieces = []
        for k in range(len(chain) - 1):
            pieces.append(Edge(f"{e.id}.{k + 1}", chain[k], chain[k + 1],
                               cuts[k + 1] - cuts[k]))
        new_edges.extend(pieces)
        edge_map[e.id] = tuple(x.id for x in pieces)
    return Subdivision(MetricTree(new_vertices, new_edges), mapping, edge_map)


def smooth(tree: MetricTree, keep: Iterable[str] = ()) -> MetricTree:
    """Remove degree-2 vertices not in ``keep`` by merging their two edges."""
    keep = set(keep)
    vertices = list(tree.vertices)
    edges = list(tree.edges)
    changed = True
    while changed:
        changed = False
        t = MetricTree(vertices, edges)
        for v in vertices:
            if v in keep or t.degree(v) != 2:
                continue
            i, j = t.incident(v)
            e1, e2 = edges[i], edges[j]
            a, c = e1.other(v), e2.other(v)
            merged = Edge(e1.id, a, c, e1.length + e2.length) if e1.v == v \
                else Edge(e1.id, c, a, e1.length + e2.length)
            edges[i] = merged
            del edges[j]
            vertices.remove(v)
            changed = True
            break
    return MetricTree(vertices, edges)
