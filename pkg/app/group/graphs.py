import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional
import networkx as nx
from sympy import factorint, multiplicity
from app.errors import BadParams, MissingRoot, NotConnected, PhenotypeMismatch
from app.group.labels import INFINITY, cap, check_label, coset_size, is_infinite

logger = logging.getLogger("MnGraphs")


class Direction(Enum):
    OUTGOING = "outgoing"
    INCOMING = "incoming"


@dataclass(frozen=True)
class MnGraph:
    """
    A labeled oriented graph. `labels` maps vertex id to its label and
    `edges` lists the positive edges as (src, trg); an edge id is its index.
    Negative edges are the reversed positive ones and are never stored.
    """
    labels: dict = field(default_factory=dict)
    edges: tuple = ()
    root: Optional[int] = None

    @property
    def vertices(self):
        return sorted(self.labels)

    def out_degree(self, vertex):
        return sum(1 for src, _ in self.edges if src == vertex)

    def in_degree(self, vertex):
        return sum(1 for _, trg in self.edges if trg == vertex)

    def with_root(self, root):
        return MnGraph(dict(self.labels), tuple(self.edges), root)


class DegreeViolation(NamedTuple):
    vertex: int
    direction: str
    degree: int
    cap: int


class TransferViolation(NamedTuple):
    edge: int
    src: int
    trg: int
    lhs: object
    rhs: object


class ValidationReport(NamedTuple):
    degree_violations: list
    transfer_violations: list
    saturated: bool
    connected: bool
    preaction_violations: tuple = ()

    @property
    def valid(self):
        return not (self.degree_violations or self.transfer_violations or self.preaction_violations)


def to_networkx(g):
    """MultiDiGraph with `label` and `is_root` node attributes; edge keys are edge ids."""
    graph = nx.MultiDiGraph()
    for vertex in g.vertices:
        graph.add_node(vertex, label=g.labels[vertex], is_root=(vertex == g.root))
    for edge_id, (src, trg) in enumerate(g.edges):
        graph.add_edge(src, trg, key=edge_id)
    return graph


def is_connected(g):
    if not g.labels:
        return False
    return nx.is_weakly_connected(to_networkx(g))


def validate(params, g):
    """Checks degree caps and the Transfer Equation; never raises."""
    out_degree = {vertex: 0 for vertex in g.labels}
    in_degree = {vertex: 0 for vertex in g.labels}
    transfer_violations = []
    degree_violations = []

    for vertex, label in g.labels.items():
        if not check_label(label):
            degree_violations.append(DegreeViolation(vertex, "label", 0, 0))

    for edge_id, (src, trg) in enumerate(g.edges):
        if src not in g.labels or trg not in g.labels:
            transfer_violations.append(TransferViolation(edge_id, src, trg, None, None))
            continue
        out_degree[src] += 1
        in_degree[trg] += 1
        lhs = coset_size(g.labels[src], params.n)
        rhs = coset_size(g.labels[trg], params.m)
        if lhs != rhs:
            transfer_violations.append(TransferViolation(edge_id, src, trg, lhs, rhs))

    saturated = True
    for vertex in g.vertices:
        label = g.labels[vertex]
        if not check_label(label):
            saturated = False
            continue
        out_cap = cap(label, params.n)
        in_cap = cap(label, params.m)
        if out_degree[vertex] > out_cap:
            degree_violations.append(DegreeViolation(vertex, "out", out_degree[vertex], out_cap))
        if in_degree[vertex] > in_cap:
            degree_violations.append(DegreeViolation(vertex, "in", in_degree[vertex], in_cap))
        if out_degree[vertex] != out_cap or in_degree[vertex] != in_cap:
            saturated = False

    report = ValidationReport(
        degree_violations=degree_violations,
        transfer_violations=transfer_violations,
        saturated=saturated and bool(g.labels),
        connected=is_connected(g),
    )
    logger.debug(f"Validated graph with {len(g.labels)} vertices: valid={report.valid}")
    return report


def phenotype(params, label):
    """Product of p^v_p(N) over primes p with v_p(m) = v_p(n) < v_p(N)."""
    if is_infinite(label):
        return INFINITY
    result = 1
    for prime, exponent in factorint(label).items():
        v_m = multiplicity(prime, abs(params.m))
        v_n = multiplicity(prime, abs(params.n))
        if v_m == v_n and exponent > v_n:
            result *= prime ** exponent
    return result


def graph_phenotype(params, g):
    if not is_connected(g):
        raise NotConnected("graph is not connected")
    values = {phenotype(params, label) for label in g.labels.values()}
    if len(values) != 1:
        raise PhenotypeMismatch(f"labels carry several phenotypes: {sorted(values, key=str)}")
    return values.pop()


def forest_label(params, label, direction):
    """
    Label of a vertex grafted by the maximal forest saturation.

    OUTGOING: a new target of a positive edge leaving a vertex labeled N,
    N|m|/(N ∧ n). INCOMING: a new source of a positive edge entering it,
    N|n|/(N ∧ m).
    """
    if is_infinite(label):
        return INFINITY
    if direction == Direction.OUTGOING:
        return label * abs(params.m) // cap(label, params.n)
    return label * abs(params.n) // cap(label, params.m)


def unimodular_forest_label(params, label):
    """Ph(N) times p^v_p(n) for every prime with v_p(Ph(N)) = 0; needs |m| = |n|."""
    if not params.unimodular:
        raise BadParams("closed form needs |m| = |n|")
    ph = phenotype(params, label)
    if is_infinite(ph):
        return INFINITY
    result = ph
    for prime, exponent in factorint(abs(params.n)).items():
        if ph % prime:
            result *= prime ** exponent
    return result


def rooted_ball(g, vertex, radius):
    """Induced labeled subgraph on vertices within `radius` of `vertex`, rooted there."""
    graph = to_networkx(g)
    ball = nx.ego_graph(graph, vertex, radius=radius, undirected=True)
    kept = set(ball.nodes)
    labels = {v: g.labels[v] for v in sorted(kept)}
    edges = tuple((src, trg) for src, trg in g.edges if src in kept and trg in kept)
    return MnGraph(labels, edges, vertex)


def rooted_isomorphic(g1, g2):
    if g1.root is None or g2.root is None:
        raise MissingRoot("both graphs need a root")
    if len(g1.labels) != len(g2.labels) or len(g1.edges) != len(g2.edges):
        return False

    def node_match(a, b):
        return a["label"] == b["label"] and a["is_root"] == b["is_root"]

    return nx.is_isomorphic(to_networkx(g1), to_networkx(g2), node_match=node_match)


def enumerate_phenotypes(params, bound):
    if bound < 1:
        raise BadParams("bound must be at least 1")
    found = {phenotype(params, label) for label in range(1, bound + 1)}
    found.add(INFINITY)
    return found


def find_saturated_graphs(params, max_label):
    """
    Saturated one-vertex graphs with label at most `max_label`: a vertex N
    carrying N ∧ n self-loops, possible exactly when N ∧ n = N ∧ m.
    """
    for label in range(1, max_label + 1):
        loops = cap(label, params.n)
        if loops == cap(label, params.m):
            yield MnGraph({0: label}, tuple((0, 0) for _ in range(loops)), 0)
