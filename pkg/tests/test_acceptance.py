"""Acceptance suite: eleven end-to-end criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed at the end of
the pytest run (see ``conftest.py``) and when this file runs as a script.
"""

import math
import random
import time
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from conftest import tent

from markovtree.bounds import branch_count_check, extract_and_bound, theta_defect
from markovtree.constructions import (certify_lower_bound, comb_map, extend_exact,
                                      lower_bound_root, star_map)
from markovtree.dynamics import (DynamicsError, SegmentSet, exactness_witness,
                                 periodic_point_in_arc, to_tree_point)
from markovtree.markov import (MarkovMap, check_ps_linear, entropy, refine_invariant_set,
                               rescale_constant_slope)
from markovtree.spectral import find_rome, matrix_profile, max_cycle_mean, perron, rome_root
from markovtree.tree import build_tree, complete_binary_tree, make_star, random_tree

LOG2 = math.log(2)
SWEEP_N = (10, 20, 40, 80, 160)
SWEEP_BASES = (2, 4)

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture(scope="module")
def sweep():
    """The ten swept extensions with their Perron roots, built once."""
    start = time.perf_counter()
    out = {}
    for n in SWEEP_BASES:
        base, S = star_map(n)
        for N in SWEEP_N:
            ext = extend_exact(base, S, N)
            m = ext.map.transition.matrix
            out[n, N] = (ext, perron(m), matrix_profile(m).primitive)
    return out, time.perf_counter() - start


# ---------------------------------------------------------------------------


def test_1_star_construction():
    start = time.perf_counter()
    bad = []
    for n in range(2, 9):
        f, _ = star_map(n)
        m = f.transition.matrix
        lam, chi = rome_root(m, [n - 1, 2 * n - 1])
        expected = [0] * (2 * n + 1)
        expected[0], expected[n], expected[2 * n] = 1, -2, 1
        if not (perron(m) == 1.0 and matrix_profile(m).structurally_zero_entropy
                and abs(lam - 1) < 1e-12 and chi == expected):
            bad.append(n)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1
    record(1, ok, f"n=2..8 exact (x^n-1)^2, lambda=1; {elapsed:.2f}s; bad={bad}")
    assert ok


def loop_lengths(m):
    prof = matrix_profile(m)
    return sorted(len(c) for c in prof.sccs if len(c) > 1 or m[c[0], c[0]])


def test_2_comb_construction():
    start = time.perf_counter()
    bad = []
    for r in range(1, 6):
        f, S = comb_map(r)
        expected = sorted([2 ** j for j in range(1, r + 1)] + [2 ** r])
        if not (entropy(f) == 0.0 and check_ps_linear(f, S).ok
                and loop_lengths(f.transition.matrix) == expected):
            bad.append(r)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1
    record(2, ok, f"r=1..5 zero entropy, (P,S)-linear, loops 2..2^r,2^r; {elapsed:.2f}s; bad={bad}")
    assert ok


def test_3_extension_sweep(sweep):
    cases, elapsed = sweep
    ok = elapsed < 10
    notes = []
    for n in SWEEP_BASES:
        gaps = [abs(math.log(cases[n, N][1]) - LOG2 / n) for N in SWEEP_N]
        primitive = all(cases[n, N][2] for N in SWEEP_N)
        # gaps reach double rounding (~1e-16) at large N; allow that much jitter
        monotone = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        ok = ok and primitive and monotone and gaps[-1] < 0.05
        notes.append(f"n={n} gap@160={gaps[-1]:.1e}")
    record(3, ok, f"primitive, gaps nonincreasing, {', '.join(notes)}; {elapsed:.2f}s")
    assert ok


def test_4_lower_bound(sweep):
    cases, _ = sweep
    near = abs(lower_bound_root(2, 200) - 2 ** 0.5) < 1e-3
    float_strict, certified = 0, 0
    ok = near
    for (n, N), (ext, lam, _) in cases.items():
        low = lower_bound_root(n, N)
        if low < lam:
            float_strict += 1
            continue
        # equal in double precision: decide the strict inequality exactly
        if abs(low - lam) < 1e-12 and certify_lower_bound(ext):
            certified += 1
        else:
            ok = False
    record(4, ok, f"root(2,200) near sqrt2; {float_strict} strict in floats, "
                  f"{certified} float ties settled by exact certificate")
    assert ok


def test_5_theta_defect(sweep):
    cases, _ = sweep
    thetas = {key: theta_defect(ext) for key, (ext, _, _) in cases.items()}
    ok = all(flag for _, flag in thetas.values())
    worst = max(float(t * (key[1] - 5) / 2) for key, (t, _) in thetas.items())
    record(5, ok, f"theta <= 2/(N-5) on all 10 extensions; max theta/(2/(N-5)) = {worst:.3f}")
    assert ok


def random_primitive(rng):
    while True:
        n = rng.randint(1, 12)
        m = np.array([[int(rng.random() < rng.uniform(0.15, 0.6)) for _ in range(n)]
                      for _ in range(n)])
        if matrix_profile(m).primitive:
            return m


def test_6_spectral_cross_validation():
    rng = random.Random(20240601)
    worst_rome = 0.0
    for _ in range(200):
        m = random_primitive(rng)
        worst_rome = max(worst_rome, abs(rome_root(m, find_rome(m))[0] - perron(m)))
    worst_mono = -math.inf
    for _ in range(500):
        n = rng.randint(1, 12)
        small = np.array([[int(rng.random() < 0.3) for _ in range(n)] for _ in range(n)])
        big = np.maximum(small, np.array([[int(rng.random() < 0.15) for _ in range(n)]
                                          for _ in range(n)]))
        worst_mono = max(worst_mono, perron(small) - perron(big))
    ok = worst_rome < 1e-8 and worst_mono <= 1e-10
    record(6, ok, f"max |rome - perron| = {worst_rome:.1e}; "
                  f"max perron(M) - perron(N) = {worst_mono:.1e}")
    assert ok


def finite_horizon(succ, weights, horizon=64):
    best = {v: weights[v] for v in range(len(succ))}
    for _ in range(horizon - 1):
        nxt = {}
        for u, val in best.items():
            for v in succ[u]:
                nxt[v] = max(nxt.get(v, -1), val + weights[v])
        best = nxt
        if not best:
            return Fraction(0)
    return Fraction(max(best.values()), horizon)


def exact_cycle_mean(succ, weights):
    graph = nx.DiGraph([(u, v) for u, vs in enumerate(succ) for v in vs])
    return max((Fraction(sum(weights[v] for v in c), len(c)) for c in nx.simple_cycles(graph)),
               default=Fraction(0))


def theta_oracle_cases():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(1, 8)
        succ = [[v for v in range(n) if rng.random() < 0.3] for _ in range(n)]
        weights = [rng.randrange(2) for _ in range(n)]
        yield n, succ, weights


def theta_oracle_survey():
    """Misses of the 1/64 tolerance, whether each is within n/64, and exact agreement."""
    misses, explained, exact = [], True, 0
    for n, succ, weights in theta_oracle_cases():
        theta = max_cycle_mean(succ, weights)
        exact += theta == exact_cycle_mean(succ, weights)
        gap = abs(theta - finite_horizon(succ, weights))
        if gap > Fraction(1, 64):
            misses.append(gap)
            explained = explained and gap <= Fraction(n, 64)
    return misses, explained, exact


# A walk of 64 vertices is cycles plus up to n transient vertices, so the
# horizon value can sit up to n/64 from the cycle mean; 1/64 is not always met.
@pytest.mark.xfail(strict=True, reason="horizon-64 oracle carries an O(n/64) transient bias")
def test_7_theta_oracle():
    misses, explained, exact = theta_oracle_survey()
    detail = f"{100 - len(misses)}/100 within 1/64; exact cycle enumeration agrees on {exact}/100"
    if misses:
        detail += f"; misses {[str(g) for g in misses]} all within n/64: {explained}"
    record(7, not misses, detail)
    assert not misses


def test_7_theta_oracle_misses_are_transient():
    misses, explained, exact = theta_oracle_survey()
    assert exact == 100 and explained


def refine_ten_times(f):
    h0 = entropy(f)
    g, arc, done, worst = f, 0, 0, 0.0
    while done < 10:
        try:
            x, _ = periodic_point_in_arc(g, arc % len(g.tree))
        except DynamicsError:
            arc += 1
            continue
        arc += 1
        if x.t in (0, 1):
            continue
        g = refine_invariant_set(g, [to_tree_point(g, x)])
        worst = max(worst, abs(entropy(g) - h0))
        done += 1
    return worst


def test_8_refinement_invariance():
    base, S = star_map(2)
    worst_tent = refine_ten_times(tent())
    worst_g = refine_ten_times(extend_exact(base, S, 10).map)
    ok = worst_tent < 1e-9 and worst_g < 1e-9
    record(8, ok, f"10 periodic refinements each; max entropy change "
                  f"tent {worst_tent:.1e}, g_10 {worst_g:.1e}")
    assert ok


def test_9_exactness_witness():
    base, S = star_map(2)
    f = extend_exact(base, S, 10).map
    cap = 50 * len(f.tree)
    rng = random.Random(11)
    steps = []
    for _ in range(20):
        arc = rng.randrange(len(f.tree))
        a = rng.randrange(1000)
        seed = SegmentSet.of({arc: [(Fraction(a, 1000), Fraction(rng.randrange(a + 1, 1001), 1000))]})
        steps.append(exactness_witness(f, seed, cap))
    swap = MarkovMap(make_star(2), {"s1": "s2", "b": "b", "s2": "s1"})
    never = all(exactness_witness(swap, SegmentSet.of({arc: [(lo, hi)]}), 1000) is None
                for arc in (0, 1)
                for lo, hi in ((Fraction(0), Fraction(1, 2)), (Fraction(1, 3), Fraction(2, 3)),
                               (Fraction(0), Fraction(99, 100))))
    ok = None not in steps and never
    shown = [s for s in steps if s is not None]
    record(9, ok, f"20 seeds covered in {min(shown, default=0)}..{max(shown, default=0)} "
                  f"steps (cap {cap}); permutation map never covers: {never}")
    assert ok


def test_10_extraction():
    arc = build_tree({"vertices": ["a", "b"], "edges": [{"id": "e", "from": "a", "to": "b"}]})
    ok = extract_and_bound(arc).certified_bound == LOG2 / 2
    trees = [complete_binary_tree(k) for k in (8, 64, 256)]
    rng = random.Random(3)
    while len(trees) < 103:
        t = random_tree(rng.randint(10, 120), rng)
        if len(t.endpoints) >= 8:
            trees.append(t)
    worst = -math.inf
    for t in trees:
        n = len(t.endpoints)
        rep = extract_and_bound(t)
        margin = rep.certified_bound - LOG2 / math.sqrt(math.log(n))
        worst = max(worst, margin)
        ok = ok and margin <= 1e-12 and set(rep.endpoints) <= set(t.endpoints)
        ok = ok and branch_count_check(t)
    record(10, ok, f"arc gives log2/2; 103 trees, max bound - log2/sqrt(log n) = {worst:.2e}")
    assert ok


def test_11_constant_slope(sweep):
    cases, _ = sweep
    worst_ratio = worst_h = 0.0
    for ext, lam, _ in cases.values():
        g, lam2 = rescale_constant_slope(ext.map)
        slopes = g.transition.slopes
        worst_ratio = max(worst_ratio, float(max(slopes) / min(slopes)) - 1)
        worst_h = max(worst_h, abs(entropy(g, method="power") - math.log(lam)),
                      abs(math.log(float(min(slopes))) - math.log(lam)))
    ok = worst_ratio < 1e-9 and worst_h < 1e-9
    record(11, ok, f"max slope ratio - 1 = {worst_ratio:.1e}; max entropy change {worst_h:.1e}")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
