import logging
from typing import NamedTuple
import networkx as nx
from app.dictionary.word_syntax import T
from app.errors import BsError, HypothesesNotMet, UndefinedAction
from app.group.graphs import graph_phenotype, unimodular_forest_label
from app.group.labels import INFINITY, coset_size, is_infinite, format_label
from app.group.preactions import (
    Point, Preaction, SaturationBuilder, disjoint_union, edge_through,
    mn_graph_of, validate_preaction
)
from app.group.words import inverse_syllables, invert

logger = logging.getLogger("Dynamics")


class MergeInput(NamedTuple):
    """Two finite preactions with basepoints x1, x2 and the words s1, s2, s3 to join them."""
    pre1: Preaction
    pre2: Preaction
    s1: object
    s2: object
    s3: object


class MergeCheck(NamedTuple):
    cond1: bool
    cond2: bool
    cond3: bool
    distance: int = 0
    depth1: int = 0
    depth2: int = 0

    @property
    def holds(self):
        return self.cond1 and self.cond2 and self.cond3


class Pasting(NamedTuple):
    preaction: Preaction
    target: Point
    bridge: tuple
    bridge_label: object


def _avoids_core(builder, point, syllables):
    """Whether the point stays off the original orbits along every prefix; returns (flag, end point)."""
    clear = builder.depth(point.orbit) > 0
    for letter, exponent in syllables:
        point, _ = builder.move(point, letter, exponent)
        if letter == T and builder.depth(point.orbit) == 0:
            clear = False
    return clear, point


def _distance(builder, source, target):
    """Graph distance in the grown saturation; the forest hangs off the core as trees."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(builder.labels)))
    graph.add_edges_from((e.source, e.target) for e in builder.edges)
    return nx.shortest_path_length(graph, source, target)


def check_merge_hypotheses(params, merge):
    """
    (1) x1.s1w stays off K1 for every prefix w of s2 s3;
    (2) x2.s3^-1 w stays off K2 for every prefix w of s2^-1 s1^-1;
    (3) d(x1.s1, x1.s1s2) >= d(K1, x1.s1) + d(K2, x2.s3^-1) + 2.
    """
    first = SaturationBuilder(params, merge.pre1)
    y = first.apply_syllables(merge.pre1.basepoint, merge.s1.syllables())
    s2 = list(merge.s2.syllables())
    s3 = list(merge.s3.syllables())
    clear_s2, y_s2 = _avoids_core(first, y, s2)
    clear_s3, _ = _avoids_core(first, y_s2, s3)

    second = SaturationBuilder(params, merge.pre2)
    z = second.apply_syllables(merge.pre2.basepoint, inverse_syllables(s3))
    backward = inverse_syllables(s2) + inverse_syllables(merge.s1.syllables())
    clear_back, _ = _avoids_core(second, z, backward)

    distance = _distance(first, y.orbit, y_s2.orbit)
    depth1 = first.depth(y.orbit)
    depth2 = second.depth(z.orbit)
    return MergeCheck(
        cond1=clear_s2 and clear_s3,
        cond2=clear_back,
        cond3=distance >= depth1 + depth2 + 2,
        distance=distance,
        depth1=depth1,
        depth2=depth2,
    )


def bridge_label(params, merge):
    ph1 = graph_phenotype(params, mn_graph_of(merge.pre1))
    ph2 = graph_phenotype(params, mn_graph_of(merge.pre2))
    if ph1 != ph2:
        raise HypothesesNotMet(f"phenotypes differ: {format_label(ph1)} != {format_label(ph2)}")
    if is_infinite(ph1):
        return INFINITY
    if not params.unimodular:
        raise HypothesesNotMet("finite phenotype needs |m| = |n|")
    return unimodular_forest_label(params, merge.pre1.labels[0])


def _walk_until_undefined(builder, point, syllables):
    """Applies chunks without growing; returns (chunks applied, point reached)."""
    for index, (letter, exponent) in enumerate(syllables):
        moved = builder.move(point, letter, exponent, grow=False)
        if moved is None:
            return index, point
        point = moved[0]
    return len(syllables), point


def paste(params, merge, check=None):
    """
    A preaction containing pre1 and pre2 side by side in which x1.s1s2s3 = x2.

    Both sides are grown along s1 and s3^-1, then s2 is followed from each
    end until it leaves the known orbits. The gap is bridged by fresh orbits
    of the constant forest label and one explicit t-edge.
    """
    if check is None:
        check = check_merge_hypotheses(params, merge)
    if not check.holds:
        raise HypothesesNotMet(f"merge conditions fail: {tuple(check[:3])}")
    label = bridge_label(params, merge)

    first = SaturationBuilder(params, merge.pre1)
    y = first.apply_syllables(merge.pre1.basepoint, merge.s1.syllables())
    second = SaturationBuilder(params, merge.pre2)
    s3_inverse = invert(params, merge.s3)
    z = second.apply_syllables(merge.pre2.basepoint, s3_inverse.syllables())

    union, shift = disjoint_union(first.snapshot(), second.snapshot())
    builder = SaturationBuilder(params, union)
    z = Point(z.orbit + shift, z.offset)
    target = Point(merge.pre2.basepoint.orbit + shift, merge.pre2.basepoint.offset)

    s2 = list(merge.s2.syllables())
    forward, y_stuck = _walk_until_undefined(builder, y, s2)
    backward, z_stuck = _walk_until_undefined(builder, z, inverse_syllables(s2))
    last = len(s2) - 1 - backward
    if forward >= len(s2) or forward > last:
        raise HypothesesNotMet("the two sides of s2 overlap")

    # s2[forward] and s2[last] are t-letters: b-moves are always defined
    y_end = builder.apply_syllables(y_stuck, s2[forward:last])
    _, eta = s2[last]
    if eta == 1:
        src, x, trg, image = y_end.orbit, y_end.offset, z_stuck.orbit, z_stuck.offset
    else:
        src, x, trg, image = z_stuck.orbit, z_stuck.offset, y_end.orbit, y_end.offset
    if coset_size(builder.label(src), params.n) != coset_size(builder.label(trg), params.m):
        raise HypothesesNotMet("bridge edge breaks the Transfer Equation")
    if builder.move(y_end, T, eta, grow=False) is not None:
        raise HypothesesNotMet("bridge slot already in use")
    builder.add_edge(edge_through(params, builder.label(src), src, x, builder.label(trg), trg, image))

    result = Preaction(labels=tuple(builder.labels), edges=tuple(builder.edges), basepoint=merge.pre1.basepoint)
    try:
        end = SaturationBuilder(params, result).apply_syllables(
            result.basepoint,
            list(merge.s1.syllables()) + s2 + list(merge.s3.syllables()),
            grow=False,
        )
    except UndefinedAction as e:
        raise HypothesesNotMet(f"pasted word undefined after chunk {e.prefix_length}")
    if end != result.point(*target):
        raise HypothesesNotMet("pasted word misses the second basepoint")
    if not validate_preaction(params, result).valid:
        raise BsError("pasting produced an invalid preaction")

    logger.debug(f"Pasted with {len(builder.created)} bridge orbits labeled {format_label(label)}")
    return Pasting(result, result.point(*target), tuple(builder.created), label)
