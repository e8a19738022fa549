import logging
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import NamedTuple
from app.dictionary.word_syntax import B, B_INV, T, T_INV
from app.errors import AlreadySaturated, InvalidGraph, UndefinedAction
from app.group.graphs import (
    Direction, MnGraph, ValidationReport, forest_label, validate
)
from app.group.labels import cap, check_label, coset_size, is_infinite
from app.group.words import word_syllables

logger = logging.getLogger("Preactions")


class Point(NamedTuple):
    orbit: int
    offset: int


class TauEdge(NamedTuple):
    """
    A positive edge carrying the t-action between two b-orbits.

    With N the source label and M the target label, the edge sends
    r + n*j to s + (M ∧ m)*anchor + m*j, offsets taken mod N and M.
    `source_residue` is a class mod N ∧ n, `target_residue` a class mod M ∧ m.
    """
    source: int
    source_residue: int
    target: int
    target_residue: int
    anchor: int = 0


class PreactionViolation(NamedTuple):
    edge: int
    reason: str


def normalize_offset(label, offset):
    return offset if is_infinite(label) else offset % label


def _solve(step, shift, label):
    """The j with step*j = shift (mod label); `shift` must lie in the right class."""
    if is_infinite(label):
        j, rest = divmod(shift, step)
        if rest:
            raise ValueError("offset outside the residue class")
        return j
    g = cap(label, step)
    if shift % g:
        raise ValueError("offset outside the residue class")
    modulus = label // g
    if modulus == 1:
        return 0
    return (shift // g) * pow((step // g) % modulus, -1, modulus) % modulus


def tau_forward(params, edge, source_label, target_label, offset):
    """Image of `offset` (in the edge's domain class) under τ."""
    j = _solve(params.n, offset - edge.source_residue, source_label)
    image = edge.target_residue + cap(target_label, params.m) * edge.anchor + params.m * j
    return normalize_offset(target_label, image)


def tau_backward(params, edge, source_label, target_label, offset):
    """Preimage of `offset` (in the edge's range class) under τ."""
    base = edge.target_residue + cap(target_label, params.m) * edge.anchor
    j = _solve(params.m, offset - base, target_label)
    return normalize_offset(source_label, edge.source_residue + params.n * j)


def edge_through(params, source_label, source, x, target_label, target, y):
    """The edge from orbit `source` to orbit `target` sending offset x to offset y."""
    out_cap = cap(source_label, params.n)
    in_cap = cap(target_label, params.m)
    r = x % out_cap
    s = y % in_cap
    j = _solve(params.n, x - r, source_label)
    anchor_shift = y - s - params.m * j
    anchor = anchor_shift // in_cap
    if not is_infinite(target_label):
        anchor %= target_label // in_cap
    return TauEdge(source, r, target, s, anchor)


@dataclass(frozen=True)
class Preaction:
    """
    b-orbits with their cardinalities, t-edges between them and a basepoint.

    Orbit ids are indices into `labels`. `depths` holds each orbit's distance
    to the original graph when the preaction was grown by saturation, 0 for
    every orbit otherwise.
    """
    labels: tuple
    edges: tuple = ()
    basepoint: Point = Point(0, 0)
    depths: tuple = ()

    def __post_init__(self):
        if not self.depths:
            object.__setattr__(self, "depths", tuple(0 for _ in self.labels))

    @cached_property
    def out_index(self):
        return {(e.source, e.source_residue): i for i, e in enumerate(self.edges)}

    @cached_property
    def in_index(self):
        return {(e.target, e.target_residue): i for i, e in enumerate(self.edges)}

    def point(self, orbit, offset):
        return Point(orbit, normalize_offset(self.labels[orbit], offset))

    def with_basepoint(self, point):
        return replace(self, basepoint=point)


class EdgePath(NamedTuple):
    edges: tuple

    def __len__(self):
        return len(self.edges)


def is_reduced_path(path):
    """No edge is crossed and immediately crossed back."""
    for (edge_a, sign_a), (edge_b, sign_b) in zip(path.edges, path.edges[1:]):
        if edge_a == edge_b and sign_a == -sign_b:
            return False
    return True


def mn_graph_of(a):
    labels = {orbit: label for orbit, label in enumerate(a.labels)}
    edges = tuple((e.source, e.target) for e in a.edges)
    return MnGraph(labels, edges, a.basepoint.orbit)


def validate_preaction(params, a):
    """Graph checks on the quotient plus residue, injectivity and commutation checks."""
    graph_report = validate(params, mn_graph_of(a))
    violations = []
    seen_out = set()
    seen_in = set()
    for edge_id, edge in enumerate(a.edges):
        if not (0 <= edge.source < len(a.labels) and 0 <= edge.target < len(a.labels)):
            violations.append(PreactionViolation(edge_id, "unknown orbit"))
            continue
        source_label = a.labels[edge.source]
        target_label = a.labels[edge.target]
        if not (check_label(source_label) and check_label(target_label)):
            violations.append(PreactionViolation(edge_id, "bad label"))
            continue
        if not 0 <= edge.source_residue < cap(source_label, params.n):
            violations.append(PreactionViolation(edge_id, "source residue out of range"))
        if not 0 <= edge.target_residue < cap(target_label, params.m):
            violations.append(PreactionViolation(edge_id, "target residue out of range"))
        if (edge.source, edge.source_residue) in seen_out:
            violations.append(PreactionViolation(edge_id, "domain class used twice"))
        if (edge.target, edge.target_residue) in seen_in:
            violations.append(PreactionViolation(edge_id, "range class used twice"))
        seen_out.add((edge.source, edge.source_residue))
        seen_in.add((edge.target, edge.target_residue))
        if coset_size(source_label, params.n) != coset_size(target_label, params.m):
            continue
        if not _commutes(params, edge, source_label, target_label):
            violations.append(PreactionViolation(edge_id, "t b^m != b^n t"))

    if a.labels and not 0 <= a.basepoint.orbit < len(a.labels):
        violations.append(PreactionViolation(-1, "basepoint outside the orbits"))

    return ValidationReport(
        degree_violations=graph_report.degree_violations,
        transfer_violations=graph_report.transfer_violations,
        saturated=graph_report.saturated,
        connected=graph_report.connected,
        preaction_violations=tuple(violations),
    )


def _commutes(params, edge, source_label, target_label, window=3):
    """Checks x.τβ^m = x.β^nτ and τ^-1 τ = id on a window of the domain class."""
    try:
        for j in range(-window, window + 1):
            x = normalize_offset(source_label, edge.source_residue + params.n * j)
            y = tau_forward(params, edge, source_label, target_label, x)
            shifted = normalize_offset(source_label, x + params.n)
            if tau_forward(params, edge, source_label, target_label, shifted) != \
                    normalize_offset(target_label, y + params.m):
                return False
            if tau_backward(params, edge, source_label, target_label, y) != x:
                return False
    except ValueError:
        return False
    return True


class SaturationBuilder:
    """
    Grows the maximal forest saturation of a preaction on demand.

    Crossing a t-slot that is not yet defined grafts one fresh orbit carrying
    the forest label, attached at residue 0 with anchor 0. A builder has a
    single writer; `snapshot` hands out immutable copies.
    """

    def __init__(self, params, preaction):
        self.params = params
        self.preaction = preaction
        self.labels = list(preaction.labels)
        self.edges = list(preaction.edges)
        self.depths = list(preaction.depths)
        self.out_index = dict(preaction.out_index)
        self.in_index = dict(preaction.in_index)
        self.created = []

    def label(self, orbit):
        return self.labels[orbit]

    def depth(self, orbit):
        return self.depths[orbit]

    def _add_orbit(self, label, depth):
        self.labels.append(label)
        self.depths.append(depth)
        orbit = len(self.labels) - 1
        self.created.append(orbit)
        return orbit

    def add_edge(self, edge):
        edge_id = len(self.edges)
        self.edges.append(edge)
        self.out_index[(edge.source, edge.source_residue)] = edge_id
        self.in_index[(edge.target, edge.target_residue)] = edge_id
        return edge_id

    def out_edge(self, orbit, residue, grow=True):
        edge_id = self.out_index.get((orbit, residue))
        if edge_id is None and grow:
            label = forest_label(self.params, self.labels[orbit], Direction.OUTGOING)
            child = self._add_orbit(label, self.depths[orbit] + 1)
            edge_id = self.add_edge(TauEdge(orbit, residue, child, 0, 0))
        return edge_id

    def in_edge(self, orbit, residue, grow=True):
        edge_id = self.in_index.get((orbit, residue))
        if edge_id is None and grow:
            label = forest_label(self.params, self.labels[orbit], Direction.INCOMING)
            parent = self._add_orbit(label, self.depths[orbit] + 1)
            edge_id = self.add_edge(TauEdge(parent, 0, orbit, residue, 0))
        return edge_id

    def move(self, point, letter, exponent=1, grow=True):
        """
        Applies b^exponent (letter 'b') or t^exponent (letter 't', exponent +-1).
        Returns (point, edge_id) or None when the move is undefined.
        """
        orbit, offset = point
        label = self.labels[orbit]
        if letter == B:
            return Point(orbit, normalize_offset(label, offset + exponent)), None
        if exponent == 1:
            edge_id = self.out_edge(orbit, offset % cap(label, self.params.n), grow)
            if edge_id is None:
                return None
            edge = self.edges[edge_id]
            image = tau_forward(self.params, edge, label, self.labels[edge.target], offset)
            return Point(edge.target, image), edge_id
        edge_id = self.in_edge(orbit, offset % cap(label, self.params.m), grow)
        if edge_id is None:
            return None
        edge = self.edges[edge_id]
        image = tau_backward(self.params, edge, self.labels[edge.source], label, offset)
        return Point(edge.source, image), edge_id

    def apply_syllables(self, point, syllables, grow=True, path=None):
        """Applies ('b', k) / ('t', e) chunks; raises UndefinedAction(chunk index + 1)."""
        for index, (letter, exponent) in enumerate(syllables):
            moved = self.move(point, letter, exponent, grow)
            if moved is None:
                raise UndefinedAction(index + 1)
            point, edge_id = moved
            if path is not None and edge_id is not None:
                path.append((edge_id, exponent))
        return point

    def apply(self, point, word, grow=True, path=None):
        """Letter-by-letter application; UndefinedAction reports a letter prefix length."""
        for index, letter in enumerate(word):
            if letter in (B, B_INV):
                moved = self.move(point, B, 1 if letter == B else -1, grow)
            elif letter in (T, T_INV):
                moved = self.move(point, T, 1 if letter == T else -1, grow)
            else:
                raise ValueError(f"unknown letter {letter!r}")
            if moved is None:
                raise UndefinedAction(index + 1)
            point, edge_id = moved
            if path is not None and edge_id is not None:
                path.append((edge_id, 1 if letter == T else -1))
        return point

    def fill(self, orbit):
        """Defines every t- and t^-1-slot of the orbit."""
        label = self.labels[orbit]
        for residue in range(cap(label, self.params.n)):
            self.out_edge(orbit, residue)
        for residue in range(cap(label, self.params.m)):
            self.in_edge(orbit, residue)

    def neighbours(self, orbit):
        label = self.labels[orbit]
        found = []
        for residue in range(cap(label, self.params.n)):
            edge_id = self.out_index.get((orbit, residue))
            if edge_id is not None:
                found.append(self.edges[edge_id].target)
        for residue in range(cap(label, self.params.m)):
            edge_id = self.in_index.get((orbit, residue))
            if edge_id is not None:
                found.append(self.edges[edge_id].source)
        return found

    def fill_ball(self, orbit, radius):
        """Completes the saturation out to `radius` around `orbit`."""
        distance = {orbit: 0}
        queue = deque([orbit])
        while queue:
            current = queue.popleft()
            if distance[current] >= radius:
                continue
            self.fill(current)
            for other in self.neighbours(current):
                if other not in distance:
                    distance[other] = distance[current] + 1
                    queue.append(other)
        return distance

    def saturate(self, depth):
        """Breadth-first closure: every orbit closer than `depth` to the original graph is filled."""
        for layer in range(depth):
            for orbit in [o for o, d in enumerate(self.depths) if d == layer]:
                self.fill(orbit)

    def snapshot(self, basepoint=None):
        return Preaction(
            labels=tuple(self.labels),
            edges=tuple(self.edges),
            basepoint=basepoint if basepoint is not None else self.preaction.basepoint,
            depths=tuple(self.depths),
        )

    def graph(self, root=None):
        labels = {orbit: label for orbit, label in enumerate(self.labels)}
        edges = tuple((e.source, e.target) for e in self.edges)
        return MnGraph(labels, edges, self.preaction.basepoint.orbit if root is None else root)


def apply(params, a, x, word):
    """x.w in the preaction itself (no saturation); raises UndefinedAction."""
    builder = SaturationBuilder(params, a)
    return builder.apply(a.point(*x), word, grow=False)


def apply_normal_form(params, a, x, nf, grow=False):
    """x.nf applied syllable by syllable; raises UndefinedAction."""
    builder = SaturationBuilder(params, a)
    return builder.apply_syllables(a.point(*x), nf.syllables(), grow=grow)


def derive_edge_path(params, a, x, word):
    path = []
    builder = SaturationBuilder(params, a)
    builder.apply(a.point(*x), word, grow=False, path=path)
    return EdgePath(tuple(path))


def saturate(params, a, depth):
    """Maximal forest saturation of `a` out to `depth` from its orbits."""
    if validate(params, mn_graph_of(a)).saturated:
        raise AlreadySaturated("preaction is already saturated")
    builder = SaturationBuilder(params, a)
    builder.saturate(depth)
    logger.debug(f"Saturated to depth {depth}: {len(a.labels)} -> {len(builder.labels)} orbits")
    return builder.snapshot()


def stabilizer_contains(params, a, word):
    """Whether `word` fixes the basepoint of the maximal forest saturation of `a`."""
    builder = SaturationBuilder(params, a)
    return builder.apply(a.basepoint, word) == a.basepoint


def realize(params, g):
    """
    A preaction whose (m,n)-graph is g: one orbit per vertex, edges take the
    lowest free residue classes at both ends, anchors 0.
    """
    report = validate(params, g)
    if not report.valid:
        raise InvalidGraph("graph violates degree caps or the Transfer Equation")
    if not report.connected:
        raise InvalidGraph("graph is not connected")

    vertices = g.vertices
    orbit_of = {vertex: index for index, vertex in enumerate(vertices)}
    next_out = [0] * len(vertices)
    next_in = [0] * len(vertices)
    edges = []
    for src, trg in g.edges:
        source = orbit_of[src]
        target = orbit_of[trg]
        edges.append(TauEdge(source, next_out[source], target, next_in[target], 0))
        next_out[source] += 1
        next_in[target] += 1

    root = g.root if g.root is not None else vertices[0]
    return Preaction(
        labels=tuple(g.labels[vertex] for vertex in vertices),
        edges=tuple(edges),
        basepoint=Point(orbit_of[root], 0),
    )


def disjoint_union(a1, a2):
    """Both preactions side by side; orbits of a2 are shifted by the returned offset."""
    shift = len(a1.labels)
    moved = tuple(
        TauEdge(e.source + shift, e.source_residue, e.target + shift, e.target_residue, e.anchor)
        for e in a2.edges
    )
    union = Preaction(
        labels=a1.labels + a2.labels,
        edges=a1.edges + moved,
        basepoint=a1.basepoint,
        depths=a1.depths + a2.depths,
    )
    return union, shift


def apply_word(builder, point, word, grow=True):
    """Chunked application of a plain word through a builder."""
    return builder.apply_syllables(point, word_syllables(word), grow=grow)
