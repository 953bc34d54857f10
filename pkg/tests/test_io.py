"""JSON round trips for trees, maps, extensions and reports."""

import json
import random
from fractions import Fraction

import pytest
from conftest import tent
from hypothesis import given, settings
from hypothesis import strategies as st

from markovtree import io
from markovtree.bounds import extract_and_bound
from markovtree.constructions import comb_map, extend_exact, star_map
from markovtree.markov import MarkovError
from markovtree.tree import complete_binary_tree, random_tree


def test_length_values_are_exact():
    assert io.length_value(Fraction(3)) == 3
    assert io.length_value(Fraction(3, 8)) == "3/8"


@pytest.mark.parametrize("make", [lambda: star_map(3), lambda: comb_map(2)])
def test_map_round_trip_is_byte_stable(make):
    f, S = make()
    text = io.dumps(io.map_to_dict(f, S))
    g, S2 = io.map_from_dict(json.loads(text))
    assert g == f and S2 == S
    assert io.dumps(io.map_to_dict(g, S2)) == text


def test_map_without_s():
    g, S = io.map_from_dict(io.map_to_dict(tent()))
    assert S is None and g == tent()


def test_interior_marks_are_subdivided():
    data = {
        "tree": {"vertices": ["0", "1"], "edges": [{"id": "I", "from": "0", "to": "1"}]},
        "marks": [{"id": "0", "at": {"vertex": "0"}},
                  {"id": "h", "at": {"edge": "I", "offset": "1/2"}},
                  {"id": "1", "at": {"vertex": "1"}}],
        "image": {"0": "0", "h": "1", "1": "0"},
    }
    f, _ = io.map_from_dict(data)
    assert len(f.tree) == 2 and f("h") == "1"


def test_malformed_map():
    with pytest.raises(MarkovError, match="malformed"):
        io.map_from_dict({"tree": io.tree_to_dict(tent().tree), "image": {}})


def test_extension_file(tmp_path):
    base, S = star_map(2)
    ext = extend_exact(base, S, 10)
    path = tmp_path / "g.json"
    io.write_json(io.extension_to_dict(ext), path)
    data = io.read_json(path)
    assert data["N"] == 10 and data["base_S"] == list(S)
    assert len(data["arc_roles"]) == 31
    g, _ = io.map_from_dict(data)
    assert g == ext.map


def test_report_file():
    rep = extract_and_bound(complete_binary_tree(8))
    data = json.loads(io.dumps(io.report_to_dict(rep)))
    assert data["kind"] == rep.kind and data["bound"] == rep.certified_bound
    assert io.tree_from_dict(data["subtree"]) == rep.subtree


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6))
def test_tree_round_trip(n, seed):
    t = random_tree(n, random.Random(seed))
    text = io.dumps(io.tree_to_dict(t))
    back = io.tree_from_dict(json.loads(text))
    assert back == t
    assert io.dumps(io.tree_to_dict(back)) == text
