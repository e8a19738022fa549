import random
import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st
from app.errors import AlreadySaturated, InvalidGraph, UndefinedAction
from app.group.graphs import (
    Direction, MnGraph, forest_label, rooted_isomorphic, to_networkx, unimodular_forest_label
)
from app.group.labels import INFINITY
from app.group.preactions import (
    EdgePath, Point, Preaction, SaturationBuilder, TauEdge, apply, apply_normal_form,
    apply_word, derive_edge_path, disjoint_union, edge_through, is_reduced_path,
    mn_graph_of, realize, saturate, stabilizer_contains, tau_backward, tau_forward,
    validate_preaction
)
from app.group.words import Params, height, reduce, spell, t_count
from tests.oracles import grow_valid_graph

groups = st.sampled_from([(2, 3), (4, 2), (2, 2), (6, 4), (-2, 3), (3, 3)])
seeds = st.integers(min_value=0, max_value=10 ** 6)
words = st.text(alphabet="bBtT", max_size=16)

# BS(2,3): one ∞-orbit, τ sends the class 0 mod 3 onto the class 0 mod 2
LOOP = Preaction(labels=(INFINITY,), edges=(TauEdge(0, 0, 0, 0, 0),))


def grown_preaction(group, seed, size=4):
    labels, edges = grow_valid_graph(*group, seed, size=size)
    return realize(Params(*group), MnGraph(labels, tuple(edges), 0))


def relator(params):
    """t b^m t^-1 b^-n spelled letter by letter."""
    b_m = ("b" if params.m > 0 else "B") * abs(params.m)
    b_n = ("B" if params.n > 0 else "b") * abs(params.n)
    return "t" + b_m + "T" + b_n


def graph_distance(builder, source, target):
    graph = nx.Graph()
    graph.add_nodes_from(range(len(builder.labels)))
    graph.add_edges_from((e.source, e.target) for e in builder.edges)
    return nx.shortest_path_length(graph, source, target)


def test_validate_preaction_examples(bs23):
    report = validate_preaction(bs23, Preaction(labels=(5,)))
    assert report.valid and not report.saturated

    assert validate_preaction(bs23, LOOP).valid

    mismatch = Preaction(labels=(3, 3), edges=(TauEdge(0, 0, 1, 0, 0),))
    report = validate_preaction(bs23, mismatch)
    assert report.transfer_violations


def test_validate_preaction_catches_reused_classes(bs23):
    doubled = Preaction(labels=(INFINITY,), edges=(TauEdge(0, 0, 0, 0, 0), TauEdge(0, 0, 0, 1, 0)))
    reasons = {v.reason for v in validate_preaction(bs23, doubled).preaction_violations}
    assert "domain class used twice" in reasons

    out_of_range = Preaction(labels=(INFINITY,), edges=(TauEdge(0, 3, 0, 0, 0),))
    reasons = {v.reason for v in validate_preaction(bs23, out_of_range).preaction_violations}
    assert "source residue out of range" in reasons


def test_mn_graph_of_examples(bs23):
    assert mn_graph_of(Preaction(labels=(7,))) == MnGraph({0: 7}, (), 0)
    assert mn_graph_of(LOOP) == MnGraph({0: INFINITY}, ((0, 0),), 0)
    union, shift = disjoint_union(LOOP, Preaction(labels=(5,)))
    assert shift == 1
    graph = to_networkx(mn_graph_of(union))
    assert nx.number_weakly_connected_components(graph) == 2


def test_apply_examples(bs23):
    x = Point(0, 0)
    assert apply(bs23, LOOP, x, "") == x
    assert apply(bs23, LOOP, x, "t") == Point(0, 0)
    assert apply(bs23, LOOP, x, "bbbt") == Point(0, 2)
    with pytest.raises(UndefinedAction) as raised:
        apply(bs23, Preaction(labels=(5,)), x, "t")
    assert raised.value.prefix_length == 1
    with pytest.raises(UndefinedAction) as raised:
        apply(bs23, LOOP, x, "tbt")
    assert raised.value.prefix_length == 3


def test_tau_inverts(bs23):
    edge = LOOP.edges[0]
    for offset in range(-9, 10, 3):
        image = tau_forward(bs23, edge, INFINITY, INFINITY, offset)
        assert image == 2 * offset // 3
        assert tau_backward(bs23, edge, INFINITY, INFINITY, image) == offset


def test_derive_edge_path_examples(bs23):
    assert derive_edge_path(bs23, LOOP, Point(0, 0), "bbB") == EdgePath(())
    assert derive_edge_path(bs23, LOOP, Point(0, 0), "t") == EdgePath(((0, 1),))
    assert is_reduced_path(EdgePath(((0, 1), (1, 1))))
    assert not is_reduced_path(EdgePath(((0, 1), (0, -1))))


def test_saturate_examples(bs23, bs22):
    one = saturate(bs23, Preaction(labels=(INFINITY,)), 1)
    assert len(one.labels) == 6
    assert set(one.labels) == {INFINITY}
    graph = mn_graph_of(one)
    assert graph.out_degree(0) == 3 and graph.in_degree(0) == 2

    point = saturate(bs22, Preaction(labels=(1,)), 1)
    assert point.labels == (1, 2, 2)
    assert point.depths == (0, 1, 1)

    unchanged = saturate(bs23, LOOP, 0)
    assert unchanged.labels == LOOP.labels and unchanged.edges == LOOP.edges

    with pytest.raises(AlreadySaturated):
        saturate(bs23, Preaction(labels=(1,), edges=(TauEdge(0, 0, 0, 0, 0),)), 2)


def test_saturation_depths_are_consistent(bs23):
    two = saturate(bs23, LOOP, 2)
    three = saturate(bs23, LOOP, 3)
    assert three.labels[:len(two.labels)] == two.labels
    assert three.edges[:len(two.edges)] == two.edges
    assert max(three.depths) == 3


def test_stabilizer_examples(bs23):
    five = Preaction(labels=(5,))
    assert stabilizer_contains(bs23, five, "bbbbb")
    assert not stabilizer_contains(bs23, five, "b")
    assert stabilizer_contains(bs23, LOOP, "tbbTBBB")
    assert stabilizer_contains(bs23, LOOP, "t")
    assert not stabilizer_contains(bs23, LOOP, "bt")


def test_realize_examples(bs23):
    assert realize(bs23, MnGraph({0: 4})) == Preaction(labels=(4,))
    assert realize(bs23, MnGraph({0: INFINITY}, ((0, 0),), 0)) == LOOP
    with pytest.raises(InvalidGraph):
        realize(bs23, MnGraph({0: 3, 1: 3}, ((0, 1),)))
    with pytest.raises(InvalidGraph):
        realize(bs23, MnGraph({0: 1, 1: 1}))


def check_realize_round_trip(group, seed):
    params = Params(*group)
    labels, edges = grow_valid_graph(*group, seed)
    g = MnGraph(labels, tuple(edges), 0)
    a = realize(params, g)
    assert validate_preaction(params, a).valid
    assert rooted_isomorphic(mn_graph_of(a), g)


@settings(max_examples=150)
@given(groups, seeds)
def test_realize_round_trip(group, seed):
    check_realize_round_trip(group, seed)


@pytest.mark.slow
@settings(max_examples=1000)
@given(groups, seeds)
def test_realize_round_trip_on_a_thousand_graphs(group, seed):
    check_realize_round_trip(group, seed)


@settings(max_examples=100)
@given(groups, seeds, words)
def test_lazy_saturation_is_an_action(group, seed, word):
    params = Params(*group)
    a = grown_preaction(group, seed)
    builder = SaturationBuilder(params, a)
    x = builder.apply(a.basepoint, word)
    assert builder.apply(x, relator(params)) == x
    nf = reduce(params, word)
    assert builder.apply_syllables(a.basepoint, nf.syllables()) == x
    assert apply_word(builder, a.basepoint, spell(nf)) == x
    assert validate_preaction(params, builder.snapshot()).valid


def check_projection_moves_at_most_the_height(group, seed, word):
    params = Params(*group)
    a = grown_preaction(group, seed)
    builder = SaturationBuilder(params, a)
    x = builder.apply(a.basepoint, word)
    builder.apply(a.basepoint, spell(reduce(params, word)))
    assert graph_distance(builder, a.basepoint.orbit, x.orbit) <= height(reduce(params, word))


@settings(max_examples=100)
@given(groups, seeds, words)
def test_projection_moves_at_most_the_height(group, seed, word):
    check_projection_moves_at_most_the_height(group, seed, word)


@pytest.mark.slow
@settings(max_examples=10000)
@given(groups, seeds, st.text(alphabet="bBtT", max_size=40))
def test_projection_bound_on_ten_thousand_applications(group, seed, word):
    check_projection_moves_at_most_the_height(group, seed, word)


@settings(max_examples=100)
@given(groups, seeds, words)
def test_edge_path_follows_the_t_letters(group, seed, word):
    params = Params(*group)
    builder = SaturationBuilder(params, grown_preaction(group, seed))
    builder.apply(builder.preaction.basepoint, word)
    a = builder.snapshot()
    x = a.basepoint
    path = derive_edge_path(params, a, x, word)
    assert len(path) == t_count(word)
    orbit = x.orbit
    for edge_id, sign in path.edges:
        edge = a.edges[edge_id]
        assert orbit == (edge.source if sign == 1 else edge.target)
        orbit = edge.target if sign == 1 else edge.source
    assert orbit == apply(params, a, x, word).orbit


@settings(max_examples=100)
@given(st.sampled_from([(2, 3), (4, 2), (-3, 5)]), seeds, words)
def test_reduced_words_lift_to_reduced_paths(group, seed, word):
    params = Params(*group)
    rng = random.Random(seed)
    start = Preaction(labels=(INFINITY,))
    builder = SaturationBuilder(params, start)
    x = builder.apply(start.basepoint, "".join(rng.choices("bBtT", k=6)))
    path = []
    nf = reduce(params, word)
    builder.apply(x, spell(nf), path=path)
    assert len(path) == height(nf)
    assert is_reduced_path(EdgePath(tuple(path)))


def check_saturation_label_law(group, seed, depth):
    params = Params(*group)
    a = grown_preaction(group, seed, size=3)
    builder = SaturationBuilder(params, a)
    builder.saturate(depth)
    saturated = builder.snapshot()
    for edge in saturated.edges:
        source_depth = saturated.depths[edge.source]
        target_depth = saturated.depths[edge.target]
        if target_depth == source_depth + 1:
            assert saturated.labels[edge.target] == forest_label(params, saturated.labels[edge.source], Direction.OUTGOING)
        elif source_depth == target_depth + 1:
            assert saturated.labels[edge.source] == forest_label(params, saturated.labels[edge.target], Direction.INCOMING)
        else:
            assert source_depth == target_depth == 0


@settings(max_examples=50)
@given(groups, seeds, st.integers(min_value=1, max_value=4))
def test_saturation_label_law(group, seed, depth):
    check_saturation_label_law(group, seed, depth)


@pytest.mark.slow
@settings(max_examples=1000)
@given(groups, seeds, st.integers(min_value=1, max_value=4))
def test_saturation_label_law_on_a_thousand_preactions(group, seed, depth):
    check_saturation_label_law(group, seed, depth)


@given(st.integers(min_value=1, max_value=200), st.integers(min_value=1, max_value=3))
def test_unimodular_saturation_uses_one_label(label, depth):
    params = Params(2, 2)
    saturated = saturate(params, Preaction(labels=(label,)), depth)
    assert set(saturated.labels[1:]) == {unimodular_forest_label(params, label)}


@settings(max_examples=100)
@given(st.sampled_from([(2, 3), (2, 2), (4, 2)]), seeds, st.text(alphabet="bBtT", max_size=10))
def test_saturation_keeps_the_stabilizer(group, seed, word):
    params = Params(*group)
    a = grown_preaction(group, seed, size=3)
    before = stabilizer_contains(params, a, word)
    for depth in range(0, 3):
        builder = SaturationBuilder(params, a)
        builder.saturate(depth)
        assert stabilizer_contains(params, builder.snapshot(), word) == before


@settings(max_examples=200)
@given(groups, st.integers(min_value=1, max_value=60), st.integers(), st.integers())
def test_edge_through_hits_the_requested_point(group, label, x, y):
    params = Params(*group)
    for source_label in (label, INFINITY):
        target_label = forest_label(params, source_label, Direction.OUTGOING)
        source = Preaction(labels=(source_label, target_label))
        x_point = source.point(0, x)
        y_point = source.point(1, y)
        edge = edge_through(params, source_label, 0, x_point.offset, target_label, 1, y_point.offset)
        assert tau_forward(params, edge, source_label, target_label, x_point.offset) == y_point.offset
        a = Preaction(labels=(source_label, target_label), edges=(edge,))
        assert validate_preaction(params, a).valid
        assert apply_normal_form(params, a, x_point, reduce(params, "t")) == y_point
