"""
Slow, independent implementations the tests compare the library against.
None of these import the code they check.
"""
import math
import random
from collections import deque


# Normal forms by naive rewriting

def _tokens(word):
    tokens = []
    for letter in word:
        if letter in "bB":
            tokens.append(("b", 1 if letter == "b" else -1))
        else:
            tokens.append(("t", 1 if letter == "t" else -1))
    return _merge(tokens)


def _merge(tokens):
    merged = []
    for kind, value in tokens:
        if kind == "b":
            if merged and merged[-1][0] == "b":
                merged[-1] = ("b", merged[-1][1] + value)
            else:
                merged.append(("b", value))
            if merged[-1][1] == 0:
                merged.pop()
        else:
            merged.append((kind, value))
    return merged


def _find_pinch(tokens, m, n):
    """Leftmost t^s b^e t^-s with e a multiple of m (s = 1) or n (s = -1)."""
    for i, (kind, sign) in enumerate(tokens):
        if kind != "t":
            continue
        source, target = (m, n) if sign == 1 else (n, m)
        if i + 1 < len(tokens) and tokens[i + 1] == ("t", -sign):
            return i, 2, 0
        if (i + 2 < len(tokens) and tokens[i + 1][0] == "b"
                and tokens[i + 2] == ("t", -sign) and tokens[i + 1][1] % source == 0):
            return i, 3, tokens[i + 1][1] // source * target
    return None


def _find_unnormalized(tokens, m, n):
    """Rightmost t^s b^e with e outside [0, |m|) (s = 1) or [0, |n|) (s = -1)."""
    for i in range(len(tokens) - 2, -1, -1):
        kind, sign = tokens[i]
        if kind == "t" and tokens[i + 1][0] == "b":
            modulus = m if sign == 1 else n
            if not 0 <= tokens[i + 1][1] < abs(modulus):
                return i
    return None


def naive_reduce(m, n, word):
    """(leading, blocks) of the normal form, rewriting with t b^m = b^n t until nothing changes."""
    tokens = _tokens(word)
    while True:
        pinch = _find_pinch(tokens, m, n)
        if pinch is not None:
            i, width, power = pinch
            tokens = _merge(tokens[:i] + [("b", power)] + tokens[i + width:])
            continue
        i = _find_unnormalized(tokens, m, n)
        if i is not None:
            sign = tokens[i][1]
            exponent = tokens[i + 1][1]
            source, target = (m, n) if sign == 1 else (n, m)
            residue = exponent % abs(source)
            quotient = (exponent - residue) // source
            tokens = _merge(tokens[:i] + [("b", quotient * target), ("t", sign), ("b", residue)] + tokens[i + 2:])
            continue
        break

    leading = 0
    if tokens and tokens[0][0] == "b":
        leading = tokens.pop(0)[1]
    blocks = []
    for kind, value in tokens:
        if kind == "t":
            blocks.append((value, 0))
        else:
            blocks[-1] = (blocks[-1][0], value)
    return leading, tuple(blocks)


def naive_is_trivial(m, n, word):
    return naive_reduce(m, n, word) == (0, ())


# Balls by breadth-first search

def bfs_ball(labels, edges, center, radius):
    """Vertices within `radius` of `center`, edges read in both directions."""
    adjacency = {vertex: set() for vertex in labels}
    for src, trg in edges:
        adjacency[src].add(trg)
        adjacency[trg].add(src)
    distance = {center: 0}
    queue = deque([center])
    while queue:
        vertex = queue.popleft()
        if distance[vertex] == radius:
            continue
        for other in adjacency[vertex]:
            if other not in distance:
                distance[other] = distance[vertex] + 1
                queue.append(other)
    return distance


# Labels along a walk

def _valuation(value, prime):
    count = 0
    while value % prime == 0:
        value //= prime
        count += 1
    return count


def label_walk(m, n, start, letters):
    """Forest labels met along a walk from a single orbit: t gives N|m|/(N∧n), t^-1 gives N|n|/(N∧m)."""
    labels = [start]
    for letter in letters:
        label = labels[-1]
        if letter == "t":
            label = label * abs(m) // math.gcd(label, n)
        elif letter == "T":
            label = label * abs(n) // math.gcd(label, m)
        labels.append(label)
    return labels


def label_valuations(m, n, prime, start, letters):
    return [_valuation(label, prime) for label in label_walk(m, n, start, letters)]


# Random valid (m,n)-graphs

def _coset(label, k):
    return label // math.gcd(label, k)


def grow_valid_graph(m, n, seed, size=6, max_label=48):
    """
    A connected valid (m,n)-graph grown by adding edges that respect the
    degree caps and the Transfer Equation. Returns (labels, edges).
    """
    rng = random.Random(seed)
    labels = {0: rng.randint(1, max_label)}
    edges = []

    def out_free(vertex):
        return math.gcd(labels[vertex], n) - sum(1 for s, _ in edges if s == vertex)

    def in_free(vertex):
        return math.gcd(labels[vertex], m) - sum(1 for _, t in edges if t == vertex)

    for _ in range(4 * size):
        vertex = rng.choice(sorted(labels))
        outgoing = rng.random() < 0.5
        if outgoing and out_free(vertex) > 0:
            wanted = _coset(labels[vertex], n)
            existing = [v for v in labels if in_free(v) > 0 and _coset(labels[v], m) == wanted]
            if existing and rng.random() < 0.3:
                edges.append((vertex, rng.choice(sorted(existing))))
            elif len(labels) < size:
                choices = [label for label in range(1, max_label + 1) if _coset(label, m) == wanted]
                new = len(labels)
                labels[new] = rng.choice(choices) if choices else labels[vertex] * abs(m) // math.gcd(labels[vertex], n)
                edges.append((vertex, new))
        elif not outgoing and in_free(vertex) > 0:
            wanted = _coset(labels[vertex], m)
            existing = [v for v in labels if out_free(v) > 0 and _coset(labels[v], n) == wanted]
            if existing and rng.random() < 0.3:
                edges.append((rng.choice(sorted(existing)), vertex))
            elif len(labels) < size:
                choices = [label for label in range(1, max_label + 1) if _coset(label, n) == wanted]
                new = len(labels)
                labels[new] = rng.choice(choices) if choices else labels[vertex] * abs(n) // math.gcd(labels[vertex], m)
                edges.append((new, vertex))
    return labels, edges
