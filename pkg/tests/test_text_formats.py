from fractions import Fraction
import pytest
from app.errors import ParseError
from app.group.graphs import MnGraph
from app.group.labels import INFINITY
from app.group.preactions import Point, Preaction, TauEdge
from app.group.words import Params
from app.processing.text_formats import (
    format_graph, format_preaction, parse_config, parse_graph, parse_label,
    parse_preaction, parse_word
)

GRAPH_TEXT = """
# two orbits of BS(2,3)
mn-graph 2 3
v 0 3
v 1 2   # target of the edge
e 0 1
root 1
"""

PREACTION_TEXT = """
mn-graph 2 3
orbit 5 inf
orbit 2 4
e 5 5
tau 0 0 0 0
basepoint 5 7
"""


@pytest.mark.parametrize("text,word", [
    ("tbbTBBB", "tbbTBBB"),
    ("t b^2 T b^-3", "tbbTBBB"),
    ("t*b^2*T*b^-3", "tbbTBBB"),
    ("t b⁻¹ t⁻¹", "tBT"),
    ("t b' t'", "tBT"),
    ("B^2 T^-1", "BBt"),
    ("b^0 t", "t"),
    ("identity", ""),
    ("", ""),
    ("  e ", ""),
])
def test_parse_word(text, word):
    assert parse_word(text) == word


@pytest.mark.parametrize("text", ["tx", "b^", "t^2.5", "a"])
def test_parse_word_rejects_junk(text):
    with pytest.raises(ParseError):
        parse_word(text)


def test_parse_label():
    assert parse_label("inf") == INFINITY
    assert parse_label("12") == 12
    for text in ("0", "-3", "ten"):
        with pytest.raises(ParseError):
            parse_label(text)


def test_parse_graph():
    params, g = parse_graph(GRAPH_TEXT)
    assert params == Params(2, 3)
    assert g == MnGraph({0: 3, 1: 2}, ((0, 1),), 1)


def test_graph_text_round_trip():
    params = Params(-2, 3)
    g = MnGraph({0: INFINITY, 3: 6}, ((0, 0), (3, 0)), 3)
    assert parse_graph(format_graph(params, g)) == (params, g)


@pytest.mark.parametrize("text", [
    "",
    "graph 2 3\nv 0 1\n",
    "mn-graph 1 3\nv 0 1\n",
    "mn-graph 2 3\nv 0 1\nv 0 2\n",
    "mn-graph 2 3\nv 0 1\ne 0 1\n",
    "mn-graph 2 3\nv 0 1\nroot 4\n",
    "mn-graph 2 3\nv 0 zero\n",
    "mn-graph 2 3\nw 0 1\n",
])
def test_parse_graph_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_parse_preaction_renumbers_orbits():
    params, a = parse_preaction(PREACTION_TEXT)
    assert params == Params(2, 3)
    assert a.labels == (4, INFINITY)
    assert a.edges == (TauEdge(1, 0, 1, 0, 0),)
    assert a.basepoint == Point(1, 7)


def test_preaction_text_round_trip():
    params = Params(2, 3)
    a = Preaction(labels=(INFINITY, 2), edges=(TauEdge(0, 1, 1, 0, 0),), basepoint=Point(1, 1))
    parsed_params, parsed = parse_preaction(format_preaction(params, a))
    assert parsed_params == params
    assert parsed.labels == a.labels
    assert parsed.edges == a.edges
    assert parsed.basepoint == a.basepoint


def test_finite_basepoint_offsets_are_reduced():
    _, a = parse_preaction("mn-graph 2 3\norbit 0 4\nbasepoint 0 9\n")
    assert a.basepoint == Point(0, 1)


@pytest.mark.parametrize("text", [
    "mn-graph 2 3\n",
    "mn-graph 2 3\norbit 0 inf\ne 0 0\n",
    "mn-graph 2 3\norbit 0 inf\ntau 0 0 0 0\n",
    "mn-graph 2 3\norbit 0 inf\nbasepoint 3 0\n",
])
def test_parse_preaction_errors(text):
    with pytest.raises(ParseError):
        parse_preaction(text)


def test_parse_config():
    settings, atoms = parse_config("""
    m 4
    n 2   # comment
    atom t 7/20
    atom T 0.15
    atom b^2 1/2
    """)
    assert settings == {"m": "4", "n": "2"}
    assert atoms == [("t", Fraction(7, 20)), ("T", Fraction(3, 20)), ("bb", Fraction(1, 2))]


@pytest.mark.parametrize("text", ["atom t", "atom t half", "m 4 5", "atom x 1/2"])
def test_parse_config_errors(text):
    with pytest.raises(ParseError):
        parse_config(text)
