"""Exact point orbits, periodic points and segment coverage."""

import random
from fractions import Fraction

import pytest
from conftest import tent
from hypothesis import given, settings
from hypothesis import strategies as st

from markovtree.constructions import extend_exact, star_map
from markovtree.dynamics import (ArcPoint, DynamicsError, SegmentSet, eval_point,
                                 exactness_witness, image_segments, orbit,
                                 periodic_point_in_arc, witness_trace)
from markovtree.markov import MarkovMap
from markovtree.tree import make_star


def tent_global(x: ArcPoint) -> Fraction:
    """Position on [0, 1] for the tent on s1 - b - s2 with e1 = b->s1 and e2 = b->s2."""
    return (1 - x.t) / 2 if x.arc == 0 else (1 + x.t) / 2


def tent_formula(y: Fraction) -> Fraction:
    return 2 * y if y <= Fraction(1, 2) else 2 - 2 * y


def swap_map():
    return MarkovMap(make_star(2), {"s1": "s2", "b": "b", "s2": "s1"})


@pytest.fixture(scope="module")
def g10():
    base, S = star_map(2)
    return extend_exact(base, S, 10)


# ---------------------------------------------------------------------------
# points


def test_tent_quarter_goes_to_half():
    f = tent()
    quarter = ArcPoint(0, Fraction(1, 2))
    assert tent_global(quarter) == Fraction(1, 4)
    assert tent_global(eval_point(f, quarter)) == Fraction(1, 2)


def test_vertex_maps_to_image_vertex():
    f = tent()
    image = eval_point(f, ArcPoint(0, Fraction(1)))           # s1
    assert tent_global(image) == 0


def test_star_inner_midpoint_translates():
    f, _ = star_map(3)
    assert eval_point(f, ArcPoint(0, Fraction(1, 2))) == ArcPoint(1, Fraction(1, 2))


def test_orbit_of_fixed_point():
    f = tent()
    x = ArcPoint(1, Fraction(1, 3))
    assert tent_global(x) == Fraction(2, 3)
    assert orbit(f, x, 5) == [x] * 6


def test_star_two_orbit_of_s1():
    f, _ = star_map(2)
    s1 = ArcPoint(2, Fraction(1))       # far end of O1
    pts = orbit(f, s1, 4)
    assert pts[1] == ArcPoint(3, Fraction(1))      # s2
    assert pts[4] == pts[0]
    assert len(set(pts[:4])) == 4


def test_zero_steps_and_negative_steps():
    f = tent()
    x = ArcPoint(0, Fraction(1, 7))
    assert orbit(f, x, 0) == [x]
    with pytest.raises(DynamicsError):
        orbit(f, x, -1)


# ---------------------------------------------------------------------------
# periodic points


def test_tent_fixed_point_in_second_arc():
    x, period = periodic_point_in_arc(tent(), 1)
    assert period == 1 and tent_global(x) == Fraction(2, 3)


def test_extension_periodic_point(g10):
    arc = g10.index("A[1][1]")
    x, period = periodic_point_in_arc(g10.map, arc)
    pts = orbit(g10.map, x, period)
    assert pts[-1] == x and x.arc == arc


def test_identity_is_neutral():
    t = make_star(3)
    f = MarkovMap(t, {v: v for v in t.vertices})
    with pytest.raises(DynamicsError, match="neutral cycle slope 1"):
        periodic_point_in_arc(f, 0)


def test_star_inner_cycle_fixes_hub():
    f, _ = star_map(3)
    x, period = periodic_point_in_arc(f, 0)
    assert period == 3 and x.t == 0


def test_arc_without_cycle():
    f, _ = star_map(3)
    with pytest.raises(DynamicsError, match="no cycle"):
        periodic_point_in_arc(f, 2, max_period=2)


# ---------------------------------------------------------------------------
# coverage


def test_tent_seed_covers_quickly():
    seed = SegmentSet.of({0: [(Fraction(3, 10), Fraction(4, 10))]})
    step = exactness_witness(tent(), seed)
    assert step is not None and step <= 6


def test_tent_interval_doubling():
    # until it straddles the turning point the seed length doubles exactly
    seed = SegmentSet.of({0: [(Fraction(3, 10), Fraction(4, 10))]})
    measures = [m for _, _, m in witness_trace(tent(), seed, cap=3)]
    assert measures[:3] == [Fraction(1, 10), Fraction(2, 10), Fraction(4, 10)]


def test_permutation_never_covers():
    seed = SegmentSet.of({0: [(Fraction(1, 4), Fraction(1, 2))]})
    assert exactness_witness(swap_map(), seed, cap=500) is None


def test_extension_random_seeds_cover(g10):
    f = g10.map
    rng = random.Random(7)
    for _ in range(20):
        arc = rng.randrange(len(f.tree))
        lo = Fraction(rng.randrange(1000), 1000)
        seed = SegmentSet.of({arc: [(lo, lo + Fraction(1, 1000))]})
        assert exactness_witness(f, seed) is not None


def test_segment_validation():
    with pytest.raises(DynamicsError):
        SegmentSet.of({0: [(Fraction(1, 2), Fraction(3, 2))]})
    with pytest.raises(DynamicsError, match="empty seed"):
        exactness_witness(tent(), SegmentSet.of({}))


# ---------------------------------------------------------------------------
# properties


fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=10**4)


@given(fractions01)
def test_tent_matches_formula(y):
    x = ArcPoint(1, 2 * y - 1) if y >= Fraction(1, 2) else ArcPoint(0, 1 - 2 * y)
    assert tent_global(eval_point(tent(), x)) == tent_formula(y)


@settings(max_examples=50, deadline=None)
@given(fractions01, fractions01)
def test_image_measure_scales_by_slope(a, b):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return
    f = tent()
    s = SegmentSet.of({0: [(lo, hi)]})
    img = image_segments(f, s)
    # each arc of the tent maps affinely with slope 2
    assert img.measure(f) == 2 * s.measure(f)
