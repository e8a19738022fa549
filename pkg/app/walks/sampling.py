import logging
from dataclasses import dataclass
from typing import NamedTuple
import numpy as np
from app.group.preactions import SaturationBuilder, apply_word
from app.group.words import IDENTITY, invert, multiply, reduce, spell

logger = logging.getLogger("Walks")


def seed_sequence(master, *key):
    """Per-trial seed derived from (master seed, key); independent of scheduling."""
    return np.random.SeedSequence(master, spawn_key=tuple(key))


def seed_value(seed):
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(1, dtype=np.uint64)[0])
    return int(seed)


@dataclass(frozen=True)
class WalkTrace:
    seed: int
    increments: tuple

    def __len__(self):
        return len(self.increments)

    def word(self):
        return "".join(self.increments)

    def partial_products(self, params):
        """S_0 = identity, S_k = S_(k-1) g_k."""
        products = [IDENTITY]
        for increment in self.increments:
            products.append(multiply(params, products[-1], reduce(params, increment)))
        return products

    def reversed(self, params):
        """The walk (g_k^-1, ..., g_1^-1)."""
        return WalkTrace(
            self.seed,
            tuple(spell(invert(params, reduce(params, g))) for g in reversed(self.increments)),
        )


def sample_walk(mu, k, seed):
    """k i.i.d. increments drawn from mu; same seed, same trace."""
    value = seed_value(seed)
    if k <= 0:
        return WalkTrace(value, ())
    rng = np.random.default_rng(value)
    words = mu.words
    indices = rng.choice(len(words), size=k, p=mu.probabilities)
    return WalkTrace(value, tuple(words[i] for i in indices))


class ProjectedTrace(NamedTuple):
    """Orbits p(x.S_0), ..., p(x.S_k), their distance to the core and the graph grown."""
    vertices: tuple
    depths: tuple
    graph: object


def project_trace(params, a, trace, depth=None, builder=None):
    """
    Follows the basepoint along the walk in the maximal forest saturation,
    grown lazily unless `depth` asks for an eager saturation first.
    """
    if builder is None:
        builder = SaturationBuilder(params, a)
    if depth:
        builder.saturate(depth)
    point = a.basepoint
    vertices = [point.orbit]
    for increment in trace.increments:
        point = apply_word(builder, point, increment)
        vertices.append(point.orbit)
    return ProjectedTrace(
        vertices=tuple(vertices),
        depths=tuple(builder.depth(v) for v in vertices),
        graph=builder.graph(),
    )
