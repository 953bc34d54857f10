"""Exact point and segment dynamics of P-linear Markov maps.

Points are held in arc coordinates ``(arc, t)`` with ``t`` in ``[0, 1]``
measured from the arc's first vertex.  Everything is rational.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .markov import MarkovError, MarkovMap
from .tree import TreePoint, VertexPoint


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class ArcPoint:
    arc: int
    t: Fraction


def canonical(f: MarkovMap, arc: int, t) -> ArcPoint:
    """Canonical coordinates: a vertex is reported on its lowest-index arc."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise DynamicsError(f"arc coordinate {t} outside [0, 1]")
    tree = f.tree
    if 0 < t < 1:
        return ArcPoint(arc, t)
    e = tree.edges[arc]
    return _vertex_point(f, e.u if t == 0 else e.v)


def _vertex_point(f: MarkovMap, v: str) -> ArcPoint:
    tree = f.tree
    i = min(tree.incident(v))
    return ArcPoint(i, Fraction(0) if tree.edges[i].u == v else Fraction(1))


def to_tree_point(f: MarkovMap, x: ArcPoint) -> TreePoint:
    e = f.tree.edges[x.arc]
    return f.tree.point_at(e.id, x.t * e.length)


def from_tree_point(f: MarkovMap, p: TreePoint) -> ArcPoint:
    p = f.tree.check_point(p)
    if isinstance(p, VertexPoint):
        return _vertex_point(f, p.vertex)
    i = f.tree.edge_index(p.edge)
    return ArcPoint(i, p.offset / f.tree.edges[i].length)


def eval_point(f: MarkovMap, x: ArcPoint) -> ArcPoint:
    """Image of ``x`` under the length-proportional realization of ``f``."""
    return from_tree_point(f, f.apply(to_tree_point(f, x)))


def orbit(f: MarkovMap, x: ArcPoint, steps: int) -> list[ArcPoint]:
    if steps < 0:
        raise DynamicsError("steps must be nonnegative")
    x = canonical(f, x.arc, x.t)
    out = [x]
    for _ in range(steps):
        x = eval_point(f, x)
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# affine charts along transitions


def _route_offsets(f: MarkovMap, arc: int) -> list[tuple[int, bool, Fraction, Fraction]]:
    """``(target, forward, start, length)`` for each arc of the image route."""
    tree = f.tree
    out, acc = [], Fraction(0)
    for j, fwd in f.transition.routes[arc]:
        ell = tree.edges[j].length
        out.append((j, fwd, acc, ell))
        acc += ell
    return out


def chart(f: MarkovMap, arc: int, target: int) -> tuple[Fraction, Fraction]:
    """``(a, b)`` with ``t' = a + b t`` for points of ``arc`` landing in ``target``."""
    total = f.transition.slopes[arc] * f.tree.edges[arc].length
    for j, fwd, start, ell in _route_offsets(f, arc):
        if j == target:
            # t' = (total t - start) / ell, reversed when traversed v to u
            if fwd:
                return -start / ell, total / ell
            return 1 + start / ell, -total / ell
    raise DynamicsError(f"arc {target} is not covered by arc {arc}")


def shortest_cycle(f: MarkovMap, arc: int, max_period: int | None = None) -> list[int] | None:
    """Arcs ``[arc, ..., arc]`` of a shortest transition cycle through ``arc``."""
    succ = f.transition.successors
    parent = {arc: None}
    queue = deque([(arc, 0)])
    hit = None
    while queue:
        u, d = queue.popleft()
        if max_period is not None and d >= max_period:
            continue
        for v in succ[u]:
            if v == arc:
                hit = u
                break
            if v not in parent:
                parent[v] = u
                queue.append((v, d + 1))
        if hit is not None:
            break
    if hit is None:
        return None
    path = [hit]
    while path[-1] != arc:
        path.append(parent[path[-1]])
    path.reverse()
    return path + [arc]


def periodic_point_in_arc(f: MarkovMap, arc: int,
                          max_period: int | None = None) -> tuple[ArcPoint, int]:
    """A periodic point in ``arc`` following a shortest transition cycle.

    The affine charts along the cycle compose to ``t -> a + b t`` on the part
    of the arc that returns; its fixed point ``a / (1 - b)`` is periodic.
    Raises on a cycle of slope exactly 1, where every point returns.
    """
    cyc = shortest_cycle(f, arc, max_period)
    if cyc is None:
        raise DynamicsError(f"no cycle through arc {arc}")
    a, b = Fraction(0), Fraction(1)
    for u, v in zip(cyc, cyc[1:]):
        c, d = chart(f, u, v)
        a, b = c + d * a, d * b
    if b == 1:
        raise DynamicsError(f"neutral cycle slope 1 along {cyc}")
    t = a / (1 - b)
    x = canonical(f, arc, t)
    period = len(cyc) - 1
    if orbit(f, x, period)[-1] != x:
        raise MarkovError("periodic point failed verification")
    return x, period


# ---------------------------------------------------------------------------
# segment sets


Interval = tuple[Fraction, Fraction]


def _merge(intervals: Sequence[Interval]) -> tuple[Interval, ...]:
    out: list[list[Fraction]] = []
    for lo, hi in sorted(intervals):
        if hi <= lo:
            continue
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


_FULL = ((Fraction(0), Fraction(1)),)


@dataclass(frozen=True)
class SegmentSet:
    """Per-arc finite unions of closed subintervals of ``[0, 1]``."""

    parts: Mapping[int, tuple[Interval, ...]]

    @classmethod
    def of(cls, pieces: Mapping[int, Sequence[tuple]]) -> "SegmentSet":
        merged = {}
        for arc, ivs in pieces.items():
            m = _merge([(Fraction(lo), Fraction(hi)) for lo, hi in ivs])
            if any(lo < 0 or hi > 1 for lo, hi in m):
                raise DynamicsError("segment outside [0, 1]")
            if m:
                merged[int(arc)] = m
        return cls(merged)

    def is_empty(self) -> bool:
        return not self.parts

    def full(self, arc: int) -> bool:
        return self.parts.get(arc) == _FULL

    def full_count(self) -> int:
        return sum(1 for arc in self.parts if self.full(arc))

    def measure(self, f: MarkovMap) -> Fraction:
        """Total length in the metric of the tree."""
        return sum(((hi - lo) * f.tree.edges[arc].length
                    for arc, ivs in self.parts.items() for lo, hi in ivs), Fraction(0))


def image_segments(f: MarkovMap, s: SegmentSet) -> SegmentSet:
    pieces: dict[int, list[Interval]] = {}
    for arc, ivs in s.parts.items():
        total = f.transition.slopes[arc] * f.tree.edges[arc].length
        for lo, hi in ivs:
            a, b = lo * total, hi * total
            for j, fwd, start, ell in _route_offsets(f, arc):
                x, y = max(a, start), min(b, start + ell)
                if y <= x:
                    continue
                u, v = (x - start) / ell, (y - start) / ell
                pieces.setdefault(j, []).append((u, v) if fwd else (1 - v, 1 - u))
    return SegmentSet.of(pieces)


def witness_trace(f: MarkovMap, seed: SegmentSet,
                  cap: int | None = None) -> Iterator[tuple[int, int, Fraction]]:
    """Yield ``(step, arcs_full, total_measure)`` until all arcs are full or ``cap``."""
    if seed.is_empty():
        raise DynamicsError("empty seed")
    n = len(f.tree)
    cap = 50 * n if cap is None else cap
    if cap < 1:
        raise DynamicsError("cap must be at least 1")
    s = seed
    for step in range(cap + 1):
        full = s.full_count()
        yield step, full, s.measure(f)
        if full == n or step == cap:
            return
        s = image_segments(f, s)


def exactness_witness(f: MarkovMap, seed: SegmentSet, cap: int | None = None) -> int | None:
    """First step at which the iterated seed covers every arc, or None by ``cap``."""
    n = len(f.tree)
    for step, full, _ in witness_trace(f, seed, cap):
        if full == n:
            return step
    return None
