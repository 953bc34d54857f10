"""Nonnegative integer matrices and their transition graphs.

Strong components, irreducibility, primitivity and permutation tests, the
Perron eigenvalue by power iteration, the rome method for the exact
characteristic polynomial, and maximum cycle means (Karp).

Sign convention: :func:`rome_root` reports ``chi(x) = det(M - x E)``, i.e.
``(-1)**(n - k) * x**n * det(R(x) - E)`` for a rome of size ``k``.  For even
``n`` this is monic; for odd ``n`` the leading coefficient is ``-1``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _poly


class SpectralError(ValueError):
    """Invalid matrix input or a failed structural precondition."""


class ConvergenceError(RuntimeError):
    """Iterative eigenvalue computation did not converge within its cap."""


def as_matrix(M) -> np.ndarray:
    """Validate and return ``M`` as a square nonnegative int64 array."""
    a = np.asarray(M)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectralError(f"matrix must be square, got shape {a.shape}")
    if a.size and not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise SpectralError("matrix entries must be integers")
    a = a.astype(np.int64)
    if np.any(a < 0):
        raise SpectralError("matrix entries must be nonnegative")
    return a


def successors(M) -> list[list[int]]:
    a = as_matrix(M)
    return [list(np.flatnonzero(row)) for row in a]


# ---------------------------------------------------------------------------
# structure


def strongly_connected_components(M) -> list[list[int]]:
    """Strong components, each sorted, ordered by smallest member."""
    a = as_matrix(M)
    n = a.shape[0]
    if n == 0:
        return []
    _, labels = connected_components(csr_matrix(a != 0), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _is_nontrivial(a: np.ndarray, comp: Sequence[int]) -> bool:
    return len(comp) > 1 or a[comp[0], comp[0]] != 0


def component_period(M, comp: Sequence[int]) -> int:
    """gcd of loop lengths inside a nontrivial strong component.

    Breadth-first levels from one vertex; the period is the gcd over internal
    edges ``u -> v`` of ``level(u) + 1 - level(v)``.
    """
    a = as_matrix(M)
    members = set(comp)
    start = comp[0]
    level = {start: 0}
    queue = deque([start])
    g = 0
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(a[u]):
            v = int(v)
            if v not in members:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            g = math.gcd(g, abs(level[u] + 1 - level[v]))
    return g


def is_permutation(M) -> bool:
    a = as_matrix(M)
    if a.shape[0] == 0:
        return False
    return bool(np.all((a == 0) | (a == 1))
                and np.all(a.sum(axis=0) == 1) and np.all(a.sum(axis=1) == 1))


@dataclass(frozen=True)
class MatrixProfile:
    sccs: tuple[tuple[int, ...], ...]
    irreducible: bool
    primitive: bool
    permutation: bool
    structurally_zero_entropy: bool
    period: int | None = None


def _is_simple_cycle(a: np.ndarray, comp: Sequence[int]) -> bool:
    block = a[np.ix_(comp, comp)]
    return bool(np.all((block == 0) | (block == 1))
                and np.all(block.sum(axis=1) == 1) and np.all(block.sum(axis=0) == 1))


def matrix_profile(M) -> MatrixProfile:
    a = as_matrix(M)
    comps = strongly_connected_components(a)
    nontrivial = [c for c in comps if _is_nontrivial(a, c)]
    irreducible = len(comps) == 1 and len(nontrivial) == 1
    period = component_period(a, comps[0]) if irreducible else None
    return MatrixProfile(
        sccs=tuple(tuple(c) for c in comps),
        irreducible=irreducible,
        primitive=irreducible and period == 1,
        permutation=is_permutation(a),
        structurally_zero_entropy=all(_is_simple_cycle(a, c) for c in nontrivial),
        period=period,
    )


# ---------------------------------------------------------------------------
# Perron eigenvalue


def _collatz_wielandt(a: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    ratios = (a @ x) / x
    return float(ratios.min()), float(ratios.max())


def _perron_block(a: np.ndarray, tol: float, cap: int) -> tuple[float, np.ndarray]:
    """Perron root and positive eigenvector of an irreducible nonnegative block.

    Power iteration on the primitive shift ``A + I`` with repeated squaring:
    after ``j`` squarings the iterate is ``(A + I)**(2**j) 1``.  All products
    are of nonnegative numbers, so small eigenvector entries keep full
    relative accuracy.  ``cap`` bounds the equivalent number of plain power
    steps; convergence is certified by the Collatz-Wielandt bracket.
    """
    n = a.shape[0]
    if _is_simple_cycle(a, range(n)):
        return 1.0, np.full(n, 1.0 / n)
    af = a.astype(float)
    b = af + np.eye(n)
    x = np.ones(n)
    steps = 1
    while True:
        x = b @ x
        x /= x.max()
        lo, hi = _collatz_wielandt(af, x)
        if hi - lo <= tol * max(1.0, hi):
            return 0.5 * (lo + hi), x / x.sum()
        if steps >= cap:
            raise ConvergenceError(
                f"no convergence within cap: bracket [{lo!r}, {hi!r}] after {steps} steps")
        if steps < 64:
            steps += 1
            continue
        b = b @ b
        b /= b.max()
        steps *= 2


def perron(M, tol: float = 1e-12, cap: int = 10**6) -> float:
    """Spectral radius of a nonnegative matrix (max over strong components)."""
    a = as_matrix(M)
    best = 0.0
    for comp in strongly_connected_components(a):
        if not _is_nontrivial(a, comp):
            continue
        lam, _ = _perron_block(a[np.ix_(comp, comp)], tol, cap)
        best = max(best, lam)
    return best


def perron_vector(M, tol: float = 1e-12, cap: int = 10**6) -> tuple[float, np.ndarray]:
    """Perron root and strictly positive right eigenvector (sum 1) of an irreducible matrix."""
    a = as_matrix(M)
    if not matrix_profile(a).irreducible:
        raise SpectralError("matrix is not irreducible")
    return _perron_block(a, tol, cap)


# ---------------------------------------------------------------------------
# rome method


@dataclass(frozen=True)
class RomeData:
    rome: tuple[int, ...]
    # (i, j) -> sorted ((length, total width of simple paths of that length), ...)
    simple_paths: dict[tuple[int, int], tuple[tuple[int, int], ...]]

    def entry(self, i: int, j: int) -> _poly.Poly:
        """Simple-path generating polynomial in ``y = 1/x`` from ``rome[i]`` to ``rome[j]``."""
        paths = self.simple_paths.get((self.rome[i], self.rome[j]), ())
        if not paths:
            return []
        out = [0] * (max(L for L, _ in paths) + 1)
        for L, w in paths:
            out[L] += w
        return out


def _find_cycle(a: np.ndarray, allowed: set[int]) -> list[int] | None:
    """Some directed cycle using only ``allowed`` vertices, or None."""
    colour = {v: 0 for v in allowed}
    for root in sorted(allowed):
        if colour[root]:
            continue
        stack = [(root, iter(np.flatnonzero(a[root])))]
        path = [root]
        colour[root] = 1
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                v = int(v)
                if v not in allowed:
                    continue
                if colour[v] == 1:
                    return path[path.index(v):]
                if colour[v] == 0:
                    colour[v] = 1
                    path.append(v)
                    stack.append((v, iter(np.flatnonzero(a[v]))))
                    advanced = True
                    break
            if not advanced:
                colour[u] = 2
                stack.pop()
                path.pop()
    return None


def verify_rome(M, R: Iterable[int]) -> RomeData:
    """Check that ``R`` meets every loop and tabulate its simple paths.

    Simple paths are counted by dynamic programming over the acyclic
    complement, aggregated by length; widths are products of entries.
    """
    a = as_matrix(M)
    n = a.shape[0]
    rome = tuple(sorted(set(int(r) for r in R)))
    if not rome:
        raise SpectralError("a rome must be non-empty")
    if rome[0] < 0 or rome[-1] >= n:
        raise SpectralError("rome index out of range")
    in_rome = set(rome)
    rest = set(range(n)) - in_rome
    cycle = _find_cycle(a, rest)
    if cycle is not None:
        raise SpectralError(f"not a rome: cycle {cycle} avoids it")

    # paths[v]: rome target -> {length: width}, for paths starting at non-rome v
    paths: dict[int, dict[int, dict[int, int]]] = {}

    def walk(v: int) -> dict[int, dict[int, int]]:
        if v in paths:
            return paths[v]
        acc: dict[int, dict[int, int]] = {}
        for u in np.flatnonzero(a[v]):
            u = int(u)
            w = int(a[v, u])
            if u in in_rome:
                row = acc.setdefault(u, {})
                row[1] = row.get(1, 0) + w
            else:
                for target, lengths in walk(u).items():
                    row = acc.setdefault(target, {})
                    for L, c in lengths.items():
                        row[L + 1] = row.get(L + 1, 0) + w * c
        paths[v] = acc
        return acc

    order = _topological(a, rest)
    for v in reversed(order):
        walk(v)
    table: dict[tuple[int, int], dict[int, int]] = {}
    for r in rome:
        for u in np.flatnonzero(a[r]):
            u = int(u)
            w = int(a[r, u])
            if u in in_rome:
                row = table.setdefault((r, u), {})
                row[1] = row.get(1, 0) + w
            else:
                for target, lengths in paths[u].items():
                    row = table.setdefault((r, target), {})
                    for L, c in lengths.items():
                        row[L + 1] = row.get(L + 1, 0) + w * c
    simple = {key: tuple(sorted((L, c) for L, c in row.items() if c))
              for key, row in table.items()}
    return RomeData(rome=rome, simple_paths={k: v for k, v in simple.items() if v})


def _topological(a: np.ndarray, allowed: set[int]) -> list[int]:
    indeg = {v: 0 for v in allowed}
    for v in allowed:
        for u in np.flatnonzero(a[v]):
            if int(u) in allowed:
                indeg[int(u)] += 1
    queue = deque(sorted(v for v, d in indeg.items() if d == 0))
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for u in np.flatnonzero(a[v]):
            u = int(u)
            if u in allowed:
                indeg[u] -= 1
                if indeg[u] == 0:
                    queue.append(u)
    return order


def find_rome(M) -> tuple[int, ...]:
    """Greedy rome: repeatedly take a highest-degree vertex lying on a remaining loop.

    Minimality is not attempted.  An acyclic matrix gets the rome ``(0,)``.
    """
    a = as_matrix(M)
    n = a.shape[0]
    if n == 0:
        raise SpectralError("empty matrix has no rome")
    rome: list[int] = []
    alive = np.ones(n, dtype=bool)
    while True:
        sub = a * np.outer(alive, alive)
        on_cycle = []
        for comp in strongly_connected_components(sub):
            if alive[comp[0]] and _is_nontrivial(sub, comp):
                on_cycle.extend(comp)
        if not on_cycle:
            break
        nz = sub != 0
        deg = nz.sum(axis=0) + nz.sum(axis=1)
        v = min(on_cycle, key=lambda i: (-int(deg[i]), i))
        rome.append(v)
        alive[v] = False
    return tuple(sorted(rome)) if rome else (0,)


def rome_charpoly(M, R: Iterable[int] | None = None) -> tuple[list[int], RomeData]:
    """Exact ``det(M - xE)`` (lowest degree first) by the rome method."""
    a = as_matrix(M)
    n = a.shape[0]
    data = verify_rome(a, find_rome(a) if R is None else R)
    k = len(data.rome)
    rm = []
    for i in range(k):
        row = []
        for j in range(k):
            entry = data.entry(i, j)
            if i == j:
                entry = _poly.sub(entry, [1])
            row.append(entry)
        rm.append(row)
    det = _poly.det_bareiss(rm)
    if len(det) > n + 1:
        raise ArithmeticError("rome determinant has degree above the matrix size")
    sign = -1 if (n - k) % 2 else 1
    chi = [0] * (n + 1)
    for d, c in enumerate(det):
        chi[n - d] = sign * c
    return chi, data


def rome_root(M, R: Iterable[int] | None = None,
              tol: float = 1e-12) -> tuple[float, list[int]]:
    """Perron eigenvalue as the largest real root of the rome-method charpoly.

    Returns ``(lambda, chi)`` with ``chi`` the exact integer coefficient list.
    With ``R=None`` a rome is discovered greedily (:func:`find_rome`).
    """
    a = as_matrix(M)
    chi, _ = rome_charpoly(a, R)
    hi = 1 + int(a.sum(axis=1).max()) if a.size else 1
    return _poly.largest_real_root(chi, Fraction(hi), tol), chi


# ---------------------------------------------------------------------------
# cycle means


def max_cycle_mean(adjacency: Sequence[Iterable[int]],
                   vertex_weights: Sequence[int]) -> Fraction:
    """Largest average vertex weight over directed cycles (0 when acyclic).

    Karp's algorithm on each strong component, with every edge carrying the
    weight of its tail vertex.
    """
    n = len(adjacency)
    succ = [sorted(set(int(v) for v in adjacency[u])) for u in range(n)]
    if len(vertex_weights) != n:
        raise SpectralError("one weight per vertex required")
    a = np.zeros((n, n), dtype=np.int64)
    for u, vs in enumerate(succ):
        a[u, vs] = 1
    best = Fraction(0)
    if n == 0:
        return best
    for comp in strongly_connected_components(a):
        if not _is_nontrivial(a, comp):
            continue
        best = max(best, _karp(comp, succ, vertex_weights))
    return best


def _karp(comp: Sequence[int], succ: list[list[int]], w: Sequence[int]) -> Fraction:
    members = set(comp)
    idx = {v: i for i, v in enumerate(comp)}
    s = len(comp)
    neg = None
    table = [[neg] * s for _ in range(s + 1)]
    table[0][0] = 0
    for k in range(1, s + 1):
        prev, cur = table[k - 1], table[k]
        for u in comp:
            du = prev[idx[u]]
            if du is None:
                continue
            val = du + w[u]
            for v in succ[u]:
                if v in members:
                    j = idx[v]
                    if cur[j] is None or val > cur[j]:
                        cur[j] = val
    best = None
    for v in range(s):
        top = table[s][v]
        if top is None:
            continue
        worst = None
        for k in range(s):
            if table[k][v] is None:
                continue
            q = Fraction(top - table[k][v], s - k)
            if worst is None or q < worst:
                worst = q
        if worst is not None and (best is None or worst > best):
            best = worst
    return best if best is not None else Fraction(0)
