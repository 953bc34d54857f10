"""Exact integer polynomial arithmetic (coefficient lists, lowest degree first)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = list[int]


def trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def add(p: Sequence[int], q: Sequence[int]) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence[int], q: Sequence[int]) -> Poly:
    return add(p, [-c for c in q])


def mul(p: Sequence[int], q: Sequence[int]) -> Poly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    qnz = [(j, c) for j, c in enumerate(q) if c]
    for i, a in enumerate(p):
        if a:
            for j, c in qnz:
                out[i + j] += a * c
    return trim(out)


def exact_div_low(p: Sequence[int], d: Sequence[int]) -> Poly:
    """Exact quotient ``p / d`` for a divisor with constant term +-1.

    Division runs from the constant term up, so integrality never depends on
    the leading coefficient of ``d``.
    """
    if not d or d[0] not in (1, -1):
        raise ValueError("divisor must have constant term +-1")
    p = trim(list(p))
    if not p:
        return []
    n = len(p) - len(d) + 1
    if n <= 0:
        raise ArithmeticError("inexact polynomial division")
    q = [0] * n
    rem = list(p)
    d0 = d[0]
    for i in range(n):
        c = rem[i] * d0  # d0 is its own inverse
        q[i] = c
        if c:
            for j in range(1, len(d)):
                if i + j < len(rem):
                    rem[i + j] -= c * d[j]
    if any(rem[n:]):
        raise ArithmeticError("inexact polynomial division")
    return trim(q)


def det_bareiss(m: list[list[Poly]]) -> Poly:
    """Determinant of a square matrix of integer polynomials.

    Fraction-free Bareiss elimination.  Every leading principal minor must
    have constant term +-1 (true for ``R(y) - E`` whose entries have no
    constant term off the identity).
    """
    k = len(m)
    if k == 0:
        return [1]
    a = [[list(x) for x in row] for row in m]
    prev: Poly = [1]
    for c in range(k - 1):
        piv = a[c][c]
        if not piv or piv[0] not in (1, -1):
            raise ArithmeticError("pivot without unit constant term")
        for i in range(c + 1, k):
            for j in range(c + 1, k):
                num = sub(mul(a[i][j], piv), mul(a[i][c], a[c][j]))
                a[i][j] = exact_div_low(num, prev) if num else []
        prev = piv
    return trim(a[k - 1][k - 1])


def evaluate(p: Sequence[int], x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _shift_all_positive(p: Sequence[int], x: Fraction) -> bool:
    """True iff every Taylor coefficient of ``p`` at ``x`` is strictly positive.

    ``x = a / 2**e`` is dyadic; the test runs on the integer polynomial
    ``2**(e*d) p(u / 2**e)`` shifted by ``a``.  Coefficient ``i`` is final
    after pass ``i``, so a nonpositive one ends the test early.
    """
    d = len(p) - 1
    num, den = x.numerator, x.denominator
    e = den.bit_length() - 1
    if den != 1 << e:
        raise ValueError("bisection points must be dyadic")
    c = [p[i] << (e * (d - i)) for i in range(d + 1)]
    for i in range(d + 1):
        for j in range(d - 1, i - 1, -1):
            c[j] += num * c[j + 1]
        if c[i] <= 0:
            return False
    return True


def largest_real_root(p: Sequence[int], hi: Fraction, tol: float = 1e-12) -> float:
    """Largest real root in ``[0, hi)`` of a polynomial whose roots all have
    real part at most its largest real root (characteristic polynomials of
    nonnegative matrices qualify).

    For such polynomials ``x`` exceeds the largest real root exactly when all
    Taylor coefficients at ``x`` are positive, which makes bisection valid
    even at roots of even multiplicity.  An integer root inside the final
    bracket is returned exactly.
    """
    p = trim(list(p))
    if not p:
        raise ValueError("zero polynomial")
    if p[-1] < 0:
        p = [-c for c in p]
    lo, hi = Fraction(0), Fraction(hi)
    e = 0
    while (1 << e) < hi.denominator:
        e += 1
    hi = Fraction(-((-hi.numerator * (1 << e)) // hi.denominator), 1 << e)
    if not _shift_all_positive(p, hi):
        raise ValueError("upper bound is not above the largest real root")
    while hi - lo > Fraction(tol):
        mid = (lo + hi) / 2
        if _shift_all_positive(p, mid):
            hi = mid
        else:
            lo = mid
    k = int(lo) if lo == int(lo) else int(lo) + 1
    if k <= hi and evaluate(p, k) == 0:
        return float(k)
    return float((lo + hi) / 2)
