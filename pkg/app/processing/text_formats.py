import logging
import re
from fractions import Fraction
from app.dictionary.word_syntax import (
    IDENTITY_TEXT, INFINITY_TEXT, INVERSE_LETTER, LETTER_ALIASES, LETTERS
)
from app.errors import BadParams, ParseError
from app.group.graphs import MnGraph
from app.group.labels import INFINITY, format_label
from app.group.preactions import Point, Preaction, TauEdge
from app.group.words import Params

logger = logging.getLogger("TextFormats")

_TOKEN = re.compile(r"\s*([bBtT])(?:\^\s*(-?\d+))?")
_SEPARATORS = str.maketrans({"*": " ", "·": " ", ".": " ", ",": " "})


def parse_word(text):
    """
    Word over b, B = b^-1, t, T = t^-1. Accepts the exponent shorthand
    b^-3 and the text 'identity' for the empty word.
    """
    source = text.strip()
    if source in ("", IDENTITY_TEXT, "1", "e"):
        return ""
    for alias, letter in LETTER_ALIASES.items():
        source = source.replace(alias, letter)
    source = source.translate(_SEPARATORS)
    letters = []
    position = 0
    while position < len(source):
        if source[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(source, position)
        if not match:
            raise ParseError(f"unexpected {source[position]!r} in word {text!r}")
        letter, exponent = match.group(1), match.group(2)
        count = 1 if exponent is None else int(exponent)
        if count < 0:
            letter = INVERSE_LETTER[letter]
        letters.append(letter * abs(count))
        position = match.end()
    word = "".join(letters)
    if any(letter not in LETTERS for letter in word):
        raise ParseError(f"bad word {text!r}")
    return word


def parse_label(text):
    if text == INFINITY_TEXT:
        return INFINITY
    try:
        label = int(text)
    except ValueError:
        raise ParseError(f"bad label {text!r}")
    if label < 1:
        raise ParseError(f"label must be positive, got {label}")
    return label


def _int(text, what):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"bad {what} {text!r}")


def _lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _header(fields, number):
    if len(fields) != 3 or fields[0] != "mn-graph":
        raise ParseError(f"line {number}: expected 'mn-graph m n'")
    try:
        return Params(_int(fields[1], "m"), _int(fields[2], "n"))
    except BadParams as e:
        raise ParseError(f"line {number}: {e}")


def parse_graph(text):
    """'mn-graph m n' then 'v <id> <label|inf>', 'e <src> <trg>' and an optional 'root <id>'."""
    params = None
    labels, edges, root = {}, [], None
    for number, fields in _lines(text):
        if params is None:
            params = _header(fields, number)
            continue
        kind = fields[0]
        if kind == "v" and len(fields) == 3:
            vertex = _int(fields[1], "vertex")
            if vertex in labels:
                raise ParseError(f"line {number}: vertex {vertex} declared twice")
            labels[vertex] = parse_label(fields[2])
        elif kind == "e" and len(fields) == 3:
            edges.append((_int(fields[1], "vertex"), _int(fields[2], "vertex")))
        elif kind == "root" and len(fields) == 2:
            root = _int(fields[1], "vertex")
        else:
            raise ParseError(f"line {number}: cannot read {' '.join(fields)!r}")
    if params is None:
        raise ParseError("empty graph file")
    for src, trg in edges:
        if src not in labels or trg not in labels:
            raise ParseError(f"edge {src} -> {trg} uses an undeclared vertex")
    if root is not None and root not in labels:
        raise ParseError(f"root {root} is not a vertex")
    return params, MnGraph(labels, tuple(edges), root)


def format_graph(params, g):
    lines = [f"mn-graph {params.m} {params.n}"]
    lines += [f"v {vertex} {format_label(g.labels[vertex])}" for vertex in g.vertices]
    lines += [f"e {src} {trg}" for src, trg in g.edges]
    if g.root is not None:
        lines.append(f"root {g.root}")
    return "\n".join(lines) + "\n"


def parse_preaction(text):
    """
    The graph format with 'orbit <id> <card|inf>' for vertices, one
    'tau <edge-id> <src-residue> <trg-residue> <anchor>' line per edge and
    'basepoint <orbit> <offset>'.
    """
    params = None
    orbits, edges, taus, basepoint = {}, [], {}, None
    for number, fields in _lines(text):
        if params is None:
            params = _header(fields, number)
            continue
        kind = fields[0]
        if kind == "orbit" and len(fields) == 3:
            orbits[_int(fields[1], "orbit")] = parse_label(fields[2])
        elif kind == "e" and len(fields) == 3:
            edges.append((_int(fields[1], "orbit"), _int(fields[2], "orbit")))
        elif kind == "tau" and len(fields) == 5:
            taus[_int(fields[1], "edge id")] = tuple(_int(f, "residue") for f in fields[2:])
        elif kind == "basepoint" and len(fields) == 3:
            basepoint = (_int(fields[1], "orbit"), _int(fields[2], "offset"))
        else:
            raise ParseError(f"line {number}: cannot read {' '.join(fields)!r}")
    if params is None:
        raise ParseError("empty preaction file")
    if not orbits:
        raise ParseError("preaction has no orbits")

    index = {orbit: i for i, orbit in enumerate(sorted(orbits))}
    tau_edges = []
    for edge_id, (src, trg) in enumerate(edges):
        if src not in index or trg not in index:
            raise ParseError(f"edge {edge_id} uses an undeclared orbit")
        if edge_id not in taus:
            raise ParseError(f"edge {edge_id} has no tau line")
        r, s, anchor = taus[edge_id]
        tau_edges.append(TauEdge(index[src], r, index[trg], s, anchor))
    if set(taus) - set(range(len(edges))):
        raise ParseError("tau line for an unknown edge")

    labels = tuple(orbits[orbit] for orbit in sorted(orbits))
    if basepoint is None:
        start = Point(0, 0)
    elif basepoint[0] not in index:
        raise ParseError(f"basepoint orbit {basepoint[0]} is not declared")
    else:
        start = Point(index[basepoint[0]], basepoint[1])
    preaction = Preaction(labels=labels, edges=tuple(tau_edges))
    return params, preaction.with_basepoint(preaction.point(*start))


def format_preaction(params, a):
    lines = [f"mn-graph {params.m} {params.n}"]
    lines += [f"orbit {orbit} {format_label(label)}" for orbit, label in enumerate(a.labels)]
    lines += [f"e {edge.source} {edge.target}" for edge in a.edges]
    lines += [
        f"tau {edge_id} {edge.source_residue} {edge.target_residue} {edge.anchor}"
        for edge_id, edge in enumerate(a.edges)
    ]
    lines.append(f"basepoint {a.basepoint.orbit} {a.basepoint.offset}")
    return "\n".join(lines) + "\n"


def parse_probability(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability {text!r}")
    return value


def parse_config(text):
    """
    Key-value lines 'key value'; 'atom <word> <probability>' lines collect
    the step measure. Returns (settings, atoms).
    """
    settings, atoms = {}, []
    for number, fields in _lines(text):
        if fields[0] == "atom":
            if len(fields) != 3:
                raise ParseError(f"line {number}: expected 'atom <word> <probability>'")
            atoms.append((parse_word(fields[1]), parse_probability(fields[2])))
        elif len(fields) == 2:
            settings[fields[0]] = fields[1]
        else:
            raise ParseError(f"line {number}: expected 'key value'")
    return settings, atoms
