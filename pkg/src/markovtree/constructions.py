"""Explicit Markov maps: zero-entropy maps on stars and combs, and the exact
extension ``g_N`` of a (P,S)-linear map over ``n`` attached arcs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .markov import MarkovError, MarkovMap, check_ps_linear
from .tree import Edge, MetricTree, TreeError


# ---------------------------------------------------------------------------
# stars


def star_map(n: int, variant: str = "fixed_hub") -> tuple[MarkovMap, tuple[str, ...]]:
    """Zero-entropy map on an ``n``-star with legs of length 1.

    Vertices ``b``, ``s{i}'`` (leg midpoints) and ``s{i}``; arcs ``I{i} = [b, s{i}']``
    then ``O{i} = [s{i}', s{i}]``.  The inner points rotate, the outer points
    rotate and ``s_n`` drops to ``s_1'``.  ``variant="literal"`` sends the hub
    to ``s_1'`` instead of fixing it, which creates a loop at ``I1`` for n >= 3.
    """
    if n < 2:
        raise TreeError("a star needs n >= 2 legs")
    if variant not in ("fixed_hub", "literal"):
        raise ValueError(f"unknown star variant {variant!r}")
    inner = [f"s{i}'" for i in range(1, n + 1)]
    outer = [f"s{i}" for i in range(1, n + 1)]
    half = Fraction(1, 2)
    edges = [Edge(f"I{i + 1}", "b", inner[i], half) for i in range(n)]
    edges += [Edge(f"O{i + 1}", inner[i], outer[i], half) for i in range(n)]
    tree = MetricTree(["b", *inner, *outer], edges)
    image = {"b": "b" if variant == "fixed_hub" else inner[0]}
    for i in range(n - 1):
        image[inner[i]] = inner[i + 1]
        image[outer[i]] = outer[i + 1]
    image[inner[-1]] = outer[0]
    image[outer[-1]] = inner[0]
    return MarkovMap(tree, image), (inner[-1], *outer)


# ---------------------------------------------------------------------------
# combs


def word_successor(word: str) -> str:
    """``word + 1`` with the carry running from the first letter to the right."""
    out = list(word)
    for i, ch in enumerate(out):
        if ch == "0":
            out[i] = "1"
            return "".join(out)
        out[i] = "0"
    return "".join(out)


def _words(length: int) -> list[str]:
    return [format(k, f"0{length}b") for k in range(2 ** length)] if length else [""]


@dataclass(frozen=True)
class CombSpec:
    r: int
    a: Mapping[str, Fraction]      # spine points a_alpha, |alpha| < r
    b: Mapping[str, Fraction]      # spine points b_beta, 1 <= |beta| <= r
    tips: tuple[str, ...]          # gamma for the teeth c_gamma, lexicographic
    level: Mapping[str, int]       # arc id -> length of its index word


def comb_spec(r: int) -> CombSpec:
    if r < 1:
        raise TreeError("comb map needs r >= 1")
    a: dict[str, Fraction] = {}
    for k in range(r):
        for alpha in _words(k):
            x = sum((Fraction(int(ch), 2 ** (i + 1)) for i, ch in enumerate(alpha)), Fraction(0))
            a[alpha] = x + Fraction(1, 2 ** (k + 1))
    shift = Fraction(1, 2 ** (r + 2))
    b: dict[str, Fraction] = {}
    for alpha, x in a.items():
        b[alpha + "0"] = x - shift
        b[alpha + "1"] = x + shift
    level = {}
    for alpha in a:
        level[f"A[{alpha}0]"] = level[f"A[{alpha}1]"] = len(alpha) + 1
        if len(alpha) <= r - 2:
            level[f"B[{alpha}0]"] = level[f"B[{alpha}1]"] = len(alpha) + 1
    for gamma in _words(r):
        level[f"C[{gamma}]"] = r
    return CombSpec(r, a, b, tuple(_words(r)), level)


def comb_map(r: int) -> tuple[MarkovMap, tuple[str, ...]]:
    """Zero-entropy map on a ``2**r``-comb.

    The spine is ``[b_{0^r}, b_{1^r}]`` with points at the dyadic coordinates
    of :func:`comb_spec`; teeth ``C[gamma] = [b_gamma, c_gamma]`` have length 1.
    Vertex ids are ``a[w]``, ``b[w]``, ``c[w]``.
    """
    spec = comb_spec(r)
    spine = sorted([(x, f"a[{w}]") for w, x in spec.a.items()]
                   + [(x, f"b[{w}]") for w, x in spec.b.items()])
    word = {name: name[2:-1] for _, name in spine}
    edges = []
    for (x, u), (y, v) in zip(spine, spine[1:]):
        if u[0] == "a":
            arc = f"A[{word[u]}1]"
        elif v[0] == "a":
            arc = f"A[{word[v]}0]"
        else:
            arc = f"B[{min(word[u], word[v], key=len)}]"
        edges.append(Edge(arc, u, v, y - x))
    for gamma in spec.tips:
        edges.append(Edge(f"C[{gamma}]", f"b[{gamma}]", f"c[{gamma}]", Fraction(1)))
    vertices = [name for _, name in spine] + [f"c[{g}]" for g in spec.tips]
    tree = MetricTree(vertices, edges)

    image = {}
    for alpha in spec.a:
        image[f"a[{alpha}]"] = f"a[{word_successor(alpha)}]"
    for beta in spec.b:
        if beta == "1" * r:
            image[f"b[{beta}]"] = f"c[{'0' * r}]"
        elif beta == "1" * len(beta):
            image[f"b[{beta}]"] = f"b[{'0' * (len(beta) + 1)}]"
        else:
            image[f"b[{beta}]"] = f"b[{word_successor(beta)}]"
    for gamma in spec.tips:
        image[f"c[{gamma}]"] = (f"b[{'0' * r}]" if gamma == "1" * r
                                else f"c[{word_successor(gamma)}]")
    S = [f"b[{'1' * r}]"]
    gamma = "0" * r
    for _ in range(2 ** r):
        S.append(f"c[{gamma}]")
        gamma = word_successor(gamma)
    return MarkovMap(tree, image), tuple(S)


# ---------------------------------------------------------------------------
# covering walk and the exact extension


def sweep_walk_vertices(tree: MetricTree, start: str) -> list[str]:
    """Closed depth-first walk from ``start`` crossing every edge twice."""
    tree.incident(start)
    walk = [start]
    seen = {start}

    def visit(v: str) -> None:
        for i in tree.incident(v):
            w = tree.edges[i].other(v)
            if w in seen:
                continue
            seen.add(w)
            walk.append(w)
            visit(w)
            walk.append(v)

    visit(start)
    return walk


def sweep_walk(f: MarkovMap | MetricTree, start: str) -> list[int]:
    """Arc indices ``j_1..j_m`` of the depth-first double cover from ``start``."""
    tree = f.tree if isinstance(f, MarkovMap) else f
    if not tree.has_vertex(start):
        raise TreeError(f"start {start!r} is not a vertex")
    walk = sweep_walk_vertices(tree, start)
    out = []
    for u, v in zip(walk, walk[1:]):
        for i in tree.incident(u):
            if tree.edges[i].other(u) == v:
                out.append(i)
                break
    return out


@dataclass(frozen=True)
class ExtensionResult:
    map: MarkovMap
    labels: Mapping[int, str]        # arc index -> B[i], A[i][j] or A[n][N-1,l]
    N: int
    n: int
    m: int
    p: int
    defect: frozenset[int]
    S_base: tuple[str, ...]

    def index(self, label: str) -> int:
        for i, lab in self.labels.items():
            if lab == label:
                return i
        raise KeyError(label)


def _t(i: int, j: int) -> str:
    return f"t[{i}][{j}]"


def extend_exact(f: MarkovMap, S: Sequence[str], N: int) -> ExtensionResult:
    """The exact extension ``g_N`` of a (P,S)-linear map ``f``.

    An arc of length 1 is attached at each ``s_i`` (``i >= 1``) and cut into
    ``N`` equal pieces ``A[i][j]``; the piece ``A[n][N-1]`` is cut further into
    ``m`` pieces following the covering walk from ``s_1``.
    """
    S = tuple(S)
    n = len(S) - 1
    if n < 2:
        raise MarkovError("extension needs n >= 2")
    if N <= 6:
        raise MarkovError(f"N too small: {N} (need N > 6)")
    if not check_ps_linear(f, S).ok:
        raise MarkovError("base not (P,S)-linear")
    base = f.tree
    p = len(base)
    walk = sweep_walk_vertices(base, S[1])
    js = sweep_walk(base, S[1])
    m = len(js)
    a_s = next(i for i in base.incident(S[n]) if base.edges[i].other(S[n]) == S[0])

    vertices = list(base.vertices)
    edges = list(base.edges)
    labels: dict[int, str] = {}
    order = [i for i in range(p) if i != a_s] + [a_s]
    for k, i in enumerate(order):
        labels[i] = f"B[{k + 1}]"
    piece = Fraction(1, N)
    for i in range(1, n + 1):
        for j in range(1, N + 1):
            start = S[i] if j == 1 else _t(i, j - 1)
            vertices.append(_t(i, j))
            if i == n and j == N - 1:
                prev = start
                for l in range(1, m + 1):
                    end = _t(i, j) if l == m else f"t[{n}][{N - 1},{l}]"
                    if l < m:
                        vertices.append(end)
                    labels[len(edges)] = f"A[{n}][{N - 1},{l}]"
                    edges.append(Edge(f"A[{n}][{N - 1},{l}]", prev, end, piece / m))
                    prev = end
            else:
                labels[len(edges)] = f"A[{i}][{j}]"
                edges.append(Edge(f"A[{i}][{j}]", start, _t(i, j), piece))
    tree = MetricTree(vertices, edges)

    image = dict(f.image)

    def t_or_s(i: int, j: int) -> str:
        return S[i] if j == 0 else _t(i, j)

    for i in range(1, n):
        for j in range(1, N + 1):
            image[_t(i, j)] = _t(i + 1, j)
    for j in range(0, N + 1):
        if j <= N - 6:
            target = t_or_s(1, j + 1)
        elif j in (N - 5, N - 3):
            target = t_or_s(1, N - 1)
        elif j == N - 4:
            target = t_or_s(1, N)
        elif j in (N - 2, N - 1):
            target = S[1]
        else:
            target = t_or_s(1, 1)
        image[t_or_s(n, j)] = target
    for l in range(1, m):
        image[f"t[{n}][{N - 1},{l}]"] = walk[l]
    g = MarkovMap(tree, image)

    defect = {labels_index for labels_index, lab in labels.items()
              if lab in {f"A[{i}][{N}]" for i in range(1, n + 1)}
              or lab in (f"A[{n}][{N - 4}]", f"A[{n}][{N - 3}]")
              or lab.startswith(f"A[{n}][{N - 1},")}
    return ExtensionResult(g, labels, N, n, m, p, frozenset(defect), S)


def restricted_matrix(ext: ExtensionResult) -> np.ndarray:
    """Transition matrix of ``g_N`` keeping only edges among ``A[i][j]``, ``j <= N-2``."""
    keep = set()
    for i, lab in ext.labels.items():
        if lab.startswith("A[") and "," not in lab:
            j = int(lab.split("][")[1].rstrip("]"))
            if j <= ext.N - 2:
                keep.add(i)
    m = np.array(ext.map.transition.matrix, dtype=np.int64)
    mask = np.zeros_like(m)
    idx = sorted(keep)
    mask[np.ix_(idx, idx)] = 1
    return m * mask


def lower_bound_root(n: int, N: int, tol: float = 1e-15) -> float:
    """Root ``x > 1`` of ``sum_{k=1}^{N-4} x**(-n*k) = 1`` by bisection."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if N <= 6:
        raise ValueError("N must exceed 6")

    def excess(x: float) -> float:
        y = x ** (-n)
        return sum(y ** k for k in range(1, N - 3)) - 1.0

    lo, hi = 1.0, 2.0 ** (1.0 / n)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lower_bound_poly(n: int, N: int) -> list[int]:
    """``x**(n K) - sum_{k=1}^{K} x**(n (K - k))`` with ``K = N - 4``, lowest degree first.

    Its only positive root is :func:`lower_bound_root`.
    """
    K = N - 4
    out = [0] * (n * K + 1)
    out[-1] = 1
    for k in range(1, K + 1):
        out[n * (K - k)] -= 1
    return out


def certify_lower_bound(ext: ExtensionResult, max_bits: int = 1024) -> bool:
    """Exact check that the lower-bound root lies strictly below the Perron root of ``g_N``.

    Brackets the lower-bound root by bisection on its sparse polynomial and
    tests the dyadic upper end ``q`` against the exact characteristic
    polynomial of ``g_N``: ``q`` lies strictly below its largest root when
    the Taylor coefficients at ``q`` are not all positive and ``q`` is not a
    root (every eigenvalue of a nonnegative matrix has real part at most the
    Perron root, so at or above it all coefficients are positive).  The bracket is tightened until this succeeds or ``max_bits`` runs out.
    """
    from . import _poly, spectral

    n, K = ext.n, ext.N - 4
    chi, _ = spectral.rome_charpoly(ext.map.transition.matrix)
    chi = chi if chi[-1] > 0 else [-c for c in chi]

    def low_positive(q: Fraction) -> bool:
        # q = a / 2**e; compare Y**K with sum_{j<K} Y**j D**(K-j), Y = a**n, D = 2**(n e)
        e = q.denominator.bit_length() - 1
        Y, shift = q.numerator ** n, n * e
        acc = 0
        for t in range(K):
            acc = acc * Y + (1 << (shift * (t + 1)))
        return Y ** K > acc

    lo, hi = Fraction(1), Fraction(2)
    bits, target = 0, 32
    while bits < max_bits:
        mid = (lo + hi) / 2
        if low_positive(mid):
            hi = mid
        else:
            lo = mid
        bits += 1
        if bits == target:
            if (not _poly._shift_all_positive(chi, hi)) and _poly.evaluate(chi, hi) != 0:
                return True
            target *= 2
    return False
