"""P-linear Markov maps on metric trees.

A map is stored combinatorially: the marked set P is the vertex set of the
tree and the map sends vertices to vertices.  Each basic arc (edge) ``[p, q]``
is carried length-proportionally onto the geodesic ``[f(p), f(q)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import spectral
from .tree import (EdgePoint, MetricTree, TreeError, TreePoint, VertexPoint,
                   smooth, subdivide_at)


class MarkovError(ValueError):
    """Invalid map data or an unmet precondition of a map operation."""


@dataclass(frozen=True)
class TransitionData:
    arcs: tuple[str, ...]
    matrix: np.ndarray
    successors: tuple[tuple[int, ...], ...]
    slopes: tuple[Fraction, ...]
    # per arc: edges of the image geodesic as (index, forward), in order
    routes: tuple[tuple[tuple[int, bool], ...], ...]


class MarkovMap:
    """A P-linear Markov self-map of a tree with P equal to the vertex set."""

    def __init__(self, tree: MetricTree, image: Mapping[str, str]):
        self.tree = tree
        img = dict(image)
        for v in tree.vertices:
            if v not in img:
                raise MarkovError(f"image not in P: no image for {v!r}")
            if not tree.has_vertex(img[v]):
                raise MarkovError(f"image not in P: {v!r} -> {img[v]!r}")
        extra = set(img) - set(tree.vertices)
        if extra:
            raise MarkovError(f"image not in P: unknown marks {sorted(extra)}")
        for e in tree.edges:
            if img[e.u] == img[e.v]:
                raise MarkovError(f"degenerate arc image on {e.id!r}: both ends go to {img[e.u]!r}")
        self._image = img

    @property
    def image(self) -> Mapping[str, str]:
        return dict(self._image)

    def __call__(self, v: str) -> str:
        return self._image[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarkovMap):
            return NotImplemented
        return self.tree == other.tree and self._image == other._image

    def __repr__(self) -> str:
        return f"MarkovMap({len(self.tree)} arcs)"

    @cached_property
    def transition(self) -> TransitionData:
        t = self.tree
        n = len(t)
        mat = np.zeros((n, n), dtype=np.int64)
        routes, slopes = [], []
        for i, e in enumerate(t.edges):
            route = tuple(t.edge_path(self._image[e.u], self._image[e.v]))
            for j, _ in route:
                mat[i, j] = 1
            routes.append(route)
            slopes.append(sum((t.edges[j].length for j, _ in route), Fraction(0)) / e.length)
        succ = tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in mat)
        mat.setflags(write=False)
        return TransitionData(tuple(e.id for e in t.edges), mat, succ,
                              tuple(slopes), tuple(routes))

    def locate(self, arc: int, distance: Fraction) -> TreePoint:
        """Point at ``distance`` along the image geodesic of ``arc``."""
        t = self.tree
        route = self.transition.routes[arc]
        left = Fraction(distance)
        for j, fwd in route:
            e = t.edges[j]
            if left <= e.length:
                return t.point_at(e.id, left if fwd else e.length - left)
            left -= e.length
        raise MarkovError("distance beyond the image of the arc")

    def apply(self, p: TreePoint) -> TreePoint:
        """Image of a tree point under the length-proportional realization."""
        p = self.tree.check_point(p)
        if isinstance(p, VertexPoint):
            return VertexPoint(self._image[p.vertex])
        i = self.tree.edge_index(p.edge)
        return self.locate(i, p.offset * self.transition.slopes[i])


def transition(f: MarkovMap) -> TransitionData:
    return f.transition


def _point_name(p: TreePoint) -> str:
    if isinstance(p, VertexPoint):
        return p.vertex
    if isinstance(p, EdgePoint):
        return f"{p.edge}@{p.offset}"
    raise MarkovError(f"not a tree point: {p!r}")


def from_point_images(tree: MetricTree, marks: Mapping[str, TreePoint] | Iterable[TreePoint],
                      image: Mapping) -> MarkovMap:
    """Build a map from images of marked points.

    ``marks`` maps mark ids to tree points (a plain iterable of points uses
    the points themselves as ids).  Marks become the vertex set: the tree is
    subdivided at interior marks and unmarked degree-2 vertices are smoothed
    away.  Vertices are renamed to their mark ids.
    """
    if not isinstance(marks, Mapping):
        marks = list(marks)
        ids = {p: _point_name(p) for p in marks}
        marks = {ids[p]: p for p in marks}
        image = {ids.get(k, k): ids.get(v, v) for k, v in image.items()}
    pts = {}
    for key, p in marks.items():
        try:
            pts[key] = tree.check_point(p)
        except TreeError as exc:
            raise MarkovError(f"mark {key!r}: {exc}") from None
    if len(set(pts.values())) != len(pts):
        raise MarkovError("two marks at the same point")
    marked_vertices = {p.vertex for p in pts.values() if isinstance(p, VertexPoint)}
    cls = tree.classify()
    for v in tree.vertices:
        if v in marked_vertices:
            continue
        if v in cls.branch_points:
            raise MarkovError(f"marks miss a branch point: {v!r}")
        if v in cls.endpoints:
            raise MarkovError(f"marks miss an end point: {v!r}")
    for key in pts:
        if key not in image:
            raise MarkovError(f"image not in P: no image for mark {key!r}")
    for key, val in image.items():
        if key not in pts:
            raise MarkovError(f"image not in P: {key!r} is not a mark")
        if val not in pts:
            raise MarkovError(f"image not in P: {key!r} -> {val!r}")
    temp = {p: f"\x00{k}" for k, p in enumerate(pts.values()) if isinstance(p, EdgePoint)}
    sub = subdivide_at(tree, pts.values(), names=temp)
    keep = {sub.points[p] for p in pts.values()}
    smoothed = smooth(sub.tree, keep)
    rename = {sub.points[p]: str(key) for key, p in pts.items()}
    new_tree = smoothed.relabel(vertices=rename)
    return MarkovMap(new_tree, {str(k): str(image[k]) for k in pts})


# ---------------------------------------------------------------------------
# entropy and properties


def _log_plus(x: float) -> float:
    return math.log(x) if x > 1 else 0.0


def perron_root(f: MarkovMap, method: str = "rome", tol: float = 1e-10) -> float:
    m = f.transition.matrix
    if method == "rome":
        return spectral.rome_root(m)[0]
    if method == "power":
        return spectral.perron(m)
    if method == "both":
        a = spectral.rome_root(m)[0]
        b = spectral.perron(m)
        if abs(a - b) > tol:
            raise MarkovError(f"methods disagree beyond tol: rome {a!r}, power {b!r}")
        return a
    raise MarkovError(f"unknown method {method!r}")


def entropy(f: MarkovMap, method: str = "rome", tol: float = 1e-10) -> float:
    """Topological entropy ``log+`` of the Perron eigenvalue of the transition matrix."""
    return _log_plus(perron_root(f, method, tol))


def dynamical_properties(f: MarkovMap) -> dict[str, bool]:
    prof = spectral.matrix_profile(f.transition.matrix)
    return {"transitive": prof.irreducible and not prof.permutation,
            "exact": prof.primitive}


@dataclass(frozen=True)
class PSReport:
    ok: bool
    failures: tuple[str, ...] = field(default_factory=tuple)


def _reaches(succ: Sequence[Sequence[int]], target: int) -> set[int]:
    """Arcs with a path (of length at least 1) to ``target``."""
    pred: list[list[int]] = [[] for _ in succ]
    for u, vs in enumerate(succ):
        for v in vs:
            pred[v].append(u)
    seen: set[int] = set()
    stack = [target]
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def check_ps_linear(f: MarkovMap, S: Sequence[str]) -> PSReport:
    """Check the three conditions of a (P,S)-linear map for ``S = (s_0..s_n)``.

    (a) ``f(s_i) = s_{i+1}``; (b) ``[s_0, s_n]`` is one basic arc and ``s_n``
    an end point; (c) every other arc has a path to that arc.
    """
    S = list(S)
    if len(S) < 2:
        raise MarkovError("S needs at least two points")
    if len(set(S)) != len(S):
        raise MarkovError("S entries must be distinct")
    t = f.tree
    for s in S:
        if not t.has_vertex(s):
            raise MarkovError(f"S entry {s!r} is not a vertex")
    fails = []
    for i in range(len(S) - 1):
        if f(S[i]) != S[i + 1]:
            fails.append(f"(a) f({S[i]}) = {f(S[i])}, expected {S[i + 1]}")
    s0, sn = S[0], S[-1]
    arc = None
    for i in t.incident(sn):
        if t.edges[i].other(sn) == s0:
            arc = i
    if arc is None:
        fails.append(f"(b) [{s0}, {sn}] is not a basic arc")
    if t.degree(sn) != 1:
        fails.append(f"(b) {sn} is not an end point")
    if arc is not None:
        reach = _reaches(f.transition.successors, arc)
        missing = [t.edges[i].id for i in range(len(t)) if i != arc and i not in reach]
        if missing:
            fails.append(f"(c) no path to {t.edges[arc].id} from {', '.join(missing)}")
    return PSReport(not fails, tuple(fails))


# ---------------------------------------------------------------------------
# re-metrization and refinement


def rescale_constant_slope(f: MarkovMap, tol: float = 1e-10) -> tuple[MarkovMap, float]:
    """Change arc lengths to a positive Perron eigenvector (total length 1).

    The transition matrix is unchanged and every slope becomes ``lambda``.
    Lengths are the exact binary values of the floating eigenvector entries.
    """
    m = f.transition.matrix
    prof = spectral.matrix_profile(m)
    if not prof.irreducible or prof.permutation:
        raise MarkovError("not transitive")
    lam, vec = spectral.perron_vector(m, tol=min(tol, 1e-12))
    vec = vec / vec.sum()
    lengths = {e.id: Fraction.from_float(float(x)) for e, x in zip(f.tree.edges, vec)}
    if any(v <= 0 for v in lengths.values()):
        raise spectral.ConvergenceError("eigenvector entry underflowed to zero")
    return MarkovMap(f.tree.with_lengths(lengths), f.image), lam


def forward_orbit(f: MarkovMap, p: TreePoint, cap: int = 10_000) -> list[TreePoint]:
    """Distinct points of the forward orbit of ``p`` until it cycles or reaches P."""
    seen: list[TreePoint] = []
    index: set[TreePoint] = set()
    x = f.tree.check_point(p)
    for _ in range(cap):
        if x in index:
            return seen
        seen.append(x)
        index.add(x)
        if isinstance(x, VertexPoint):
            return seen
        x = f.apply(x)
    raise MarkovError(f"orbit not finite within cap {cap}")


def refine_invariant_set(f: MarkovMap, extra: Iterable[TreePoint],
                         cap: int = 10_000) -> MarkovMap:
    """Add the forward orbits of ``extra`` to P; the pointwise action is unchanged."""
    orbit: list[TreePoint] = []
    for p in extra:
        for x in forward_orbit(f, p, cap):
            if isinstance(x, EdgePoint) and x not in orbit:
                orbit.append(x)
    if not orbit:
        return f
    sub = subdivide_at(f.tree, orbit)
    img = dict(f.image)
    for x in orbit:
        y = f.apply(x)
        img[sub.points[x]] = y.vertex if isinstance(y, VertexPoint) else sub.points[y]
    return MarkovMap(sub.tree, img)
