"""Entropy bounds: the P-Lipschitz bound, the defect frequency of ``g_N``,
and star/comb extraction for trees with many end points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import spectral
from .constructions import ExtensionResult
from .tree import MetricTree, TreeError


@dataclass(frozen=True)
class LipschitzSpec:
    successors: tuple[tuple[int, ...], ...]
    constants: tuple[float, ...]
    subsystem: frozenset[int]

    def __post_init__(self):
        if not self.subsystem:
            raise ValueError("empty subsystem")
        if len(self.constants) != len(self.successors):
            raise ValueError("one Lipschitz constant per arc required")
        if any(c <= 0 for c in self.constants):
            raise ValueError("Lipschitz constants must be positive")
        if not self.subsystem <= set(range(len(self.successors))):
            raise ValueError("subsystem index out of range")


def _log_plus(x: float) -> float:
    return math.log(x) if x > 1 else 0.0


def outside_frequency(spec: LipschitzSpec) -> Fraction:
    """Largest asymptotic frequency of arcs outside the subsystem along paths."""
    weights = [0 if i in spec.subsystem else 1 for i in range(len(spec.successors))]
    return spectral.max_cycle_mean(spec.successors, weights)


def p_lipschitz_bound(spec: LipschitzSpec) -> float:
    """``log+ L_B + 2 theta_B log+ L_A`` with the maxima over the subsystem and over all arcs."""
    theta = outside_frequency(spec)
    l_sub = max(spec.constants[i] for i in spec.subsystem)
    l_all = max(spec.constants)
    return _log_plus(l_sub) + 2 * float(theta) * _log_plus(l_all)


def g_n_profile(ext: ExtensionResult, L2: float = 4.0, lam: float | None = None) -> LipschitzSpec:
    """Lipschitz data for ``g_N``: ``lambda`` off the defect set, ``2 lambda L2`` on it."""
    td = ext.map.transition
    if lam is None:
        lam = spectral.perron(td.matrix)
    consts = tuple(2 * lam * L2 if i in ext.defect else lam for i in range(len(td.arcs)))
    keep = frozenset(range(len(td.arcs))) - ext.defect
    return LipschitzSpec(td.successors, consts, keep)


def theta_defect(ext: ExtensionResult, defect: Iterable[int] | None = None) -> tuple[Fraction, bool]:
    """Maximum cycle frequency of the defect arcs and whether it is at most ``2/(N-5)``."""
    d = ext.defect if defect is None else set(defect)
    td = ext.map.transition
    weights = [1 if i in d else 0 for i in range(len(td.arcs))]
    theta = spectral.max_cycle_mean(td.successors, weights)
    return theta, theta <= Fraction(2, ext.N - 5)


# ---------------------------------------------------------------------------
# extraction


@dataclass(frozen=True)
class ExtractionReport:
    kind: str                 # "star" or "comb"
    subtree: MetricTree
    endpoints: tuple[str, ...]
    k: int
    certified_bound: float


def choose_k(n: int) -> int:
    """The integer ``k`` with ``sqrt(log n) - 1 <= k < sqrt(log n)``."""
    s = math.sqrt(math.log(n))
    return math.ceil(s) - 1


def _component_edges(tree: MetricTree, start: str, avoid: str) -> tuple[list[int], list[str]]:
    """Edges and vertices reached from ``start`` without passing ``avoid``."""
    seen = {avoid, start}
    stack = [start]
    edges, verts = [], [start]
    for i in tree.incident(avoid):
        if tree.edges[i].other(avoid) == start:
            edges.append(i)
    while stack:
        v = stack.pop()
        for i in tree.incident(v):
            w = tree.edges[i].other(v)
            if w not in seen:
                seen.add(w)
                edges.append(i)
                verts.append(w)
                stack.append(w)
    return edges, verts


def _leg(tree: MetricTree, hub: str, first: str) -> list[int]:
    """Edges of a path from ``hub`` through ``first`` to an end point of the tree."""
    path = [i for i in tree.incident(hub) if tree.edges[i].other(hub) == first]
    prev, v = hub, first
    while tree.degree(v) > 1:
        i = next(i for i in tree.incident(v) if tree.edges[i].other(v) != prev)
        path.append(i)
        prev, v = v, tree.edges[i].other(v)
    return path


def _branch_count(tree: MetricTree, verts: Iterable[str], ignore: str) -> int:
    return sum(1 for v in verts if v != ignore and tree.degree(v) >= 3)


def _rooted_comb_from(tree: MetricTree, root: str, first: str, p: int) -> list[int]:
    """``(p+3)``-comb inside the component of ``T - root`` containing ``first``,
    with ``root`` as an outermost end point."""
    path = [i for i in tree.incident(root) if tree.edges[i].other(root) == first]
    prev, v = root, first
    while tree.degree(v) == 2:
        i = next(i for i in tree.incident(v) if tree.edges[i].other(v) != prev)
        path.append(i)
        prev, v = v, tree.edges[i].other(v)
    if tree.degree(v) < 3:
        raise TreeError("not enough branch points for the requested comb")
    b = v
    options = []
    for i in tree.incident(b):
        w = tree.edges[i].other(b)
        if w == prev:
            continue
        _, verts = _component_edges(tree, w, b)
        options.append((-_branch_count(tree, verts, b), w))
    options.sort()
    if p == 0:
        return path + _leg(tree, b, options[0][1]) + _leg(tree, b, options[1][1])
    rich, other = options[0][1], options[1][1]
    return path + _rooted_comb_from(tree, b, rich, p - 1) + _leg(tree, b, other)


def extract_comb(tree: MetricTree, p: int) -> MetricTree:
    """A ``(p+3)``-comb inside ``tree`` whose end points are end points of ``tree``.

    Starts from the first end point of the tree in vertex order.
    """
    ends = tree.endpoints
    if not ends:
        raise TreeError("degenerate tree")
    e = ends[0]
    (i,) = tree.incident(e)
    edges = _rooted_comb_from(tree, e, tree.edges[i].other(e), p)
    return tree.subtree(tree.edges[j].id for j in set(edges))


def extract_star(tree: MetricTree, legs: int) -> MetricTree:
    """A ``legs``-star centred at a vertex of highest order, legs ending at end points."""
    if legs < 2:
        raise ValueError("a star needs at least two legs")
    hub = max(tree.vertices, key=lambda v: tree.degree(v))
    if tree.degree(hub) < legs:
        raise TreeError(f"no vertex of order {legs}")
    edges: set[int] = set()
    for i in tree.incident(hub)[:legs]:
        edges.update(_leg(tree, hub, tree.edges[i].other(hub)))
    return tree.subtree(tree.edges[j].id for j in edges)


def extract_and_bound(tree: MetricTree, k: int | None = None) -> ExtractionReport:
    """Certify an entropy bound from a star or comb inside ``tree``.

    With ``n`` end points, ``k`` satisfies ``sqrt(log n) - 1 <= k < sqrt(log n)``
    (at least 1) unless given.  A vertex of order at least ``k + 1`` yields a
    ``(k+1)``-star and bound ``log 2 / (k+1)``; otherwise a ``(2k+2)``-comb is
    extracted and the bound is ``log 2 / 2**r`` for the largest ``2**r <= 2k+2``.
    An arc gets ``log 2 / 2``.
    """
    if len(tree) == 0:
        raise TreeError("degenerate tree")
    n = len(tree.endpoints)
    if n == 2:
        ends = tuple(tree.endpoints)
        return ExtractionReport("star", tree, ends, 1, math.log(2) / 2)
    if k is None:
        k = max(1, choose_k(n))
    if k < 1:
        raise ValueError("k must be positive")
    if max(tree.degree(v) for v in tree.vertices) >= k + 1:
        sub = extract_star(tree, max(k + 1, 2))
        return ExtractionReport("star", sub, tuple(sub.endpoints), k, math.log(2) / (k + 1))
    count = 2 * k + 2
    sub = extract_comb(tree, count - 3)
    r = count.bit_length() - 1
    return ExtractionReport("comb", sub, tuple(sub.endpoints), k, math.log(2) / 2 ** r)


def is_comb(tree: MetricTree) -> bool:
    """True when every branch point has order 3 and all lie on one arc."""
    branch = tree.branch_points
    if any(tree.degree(v) != 3 for v in branch):
        return False
    if len(branch) <= 2:
        return True
    ends = [v for v in branch
            if sum(1 for w in tree.neighbors(v) if _side_has_branch(tree, w, v)) <= 1]
    if len(ends) != 2:
        return False
    on_path = set(tree.vertex_path(ends[0], ends[1]))
    return all(v in on_path for v in branch)


def _side_has_branch(tree: MetricTree, start: str, avoid: str) -> bool:
    _, verts = _component_edges(tree, start, avoid)
    return any(tree.degree(v) >= 3 for v in verts)


def is_star(tree: MetricTree) -> bool:
    return len(tree.branch_points) <= 1 and all(
        tree.degree(v) <= 2 or v in tree.branch_points for v in tree.vertices)


def branch_count_check(tree: MetricTree) -> bool:
    """Branch-point count is at least ``n / k`` for ``k`` the largest branch order."""
    n = len(tree.endpoints)
    if n < 3:
        raise TreeError("fewer than 3 endpoints")
    k = max(tree.degree(v) for v in tree.vertices)
    return len(tree.branch_points) * k >= n
