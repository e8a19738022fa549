import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple
import numpy as np
from app.dictionary.word_syntax import B, B_INV, T, T_INV
from app.errors import BadParams
from app.group.words import generator_of, height, invert, reduce, spell

logger = logging.getLogger("Walks")


@dataclass(frozen=True)
class StepMeasure:
    """Finitely supported probability measure on words, with exact weights."""
    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise BadParams("step measure has no atoms")
        total = Fraction(0)
        for word, weight in self.atoms:
            if weight <= 0:
                raise BadParams(f"atom {word or 'identity'} has non-positive weight {weight}")
            total += weight
        if total != 1:
            raise BadParams(f"weights sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, weights):
        merged = defaultdict(Fraction)
        for word, weight in weights.items() if hasattr(weights, "items") else weights:
            merged[word] += Fraction(weight)
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def uniform(cls, words=(B, B_INV, T, T_INV)):
        share = Fraction(1, len(words))
        return cls.from_mapping({word: share for word in words})

    @property
    def words(self):
        return [word for word, _ in self.atoms]

    @property
    def probabilities(self):
        return np.array([float(weight) for _, weight in self.atoms])

    def weight(self, word):
        return sum((w for atom, w in self.atoms if atom == word), Fraction(0))

    def element_weights(self, params):
        """Mass of each group element, keyed by its normal form."""
        weights = defaultdict(Fraction)
        for word, weight in self.atoms:
            weights[reduce(params, word)] += weight
        return weights

    def inverted(self, params):
        """Pushforward under g -> g^-1."""
        return StepMeasure.from_mapping(
            [(spell(invert(params, reduce(params, word))), weight) for word, weight in self.atoms]
        )

    def is_weight_symmetric(self, params):
        weights = self.element_weights(params)
        return all(weights.get(invert(params, nf), 0) == weight for nf, weight in weights.items())

    def generator_weights(self, params):
        """Mass on each standard generator; None if the support has other elements."""
        weights = {letter: Fraction(0) for letter in (B, B_INV, T, T_INV)}
        for word, weight in self.atoms:
            letter = generator_of(params, word)
            if letter is None:
                return None
            weights[letter] += weight
        return weights

    def max_height(self, params):
        return max(height(reduce(params, word)) for word, _ in self.atoms)

    def to_config(self):
        return {word or "identity": f"{weight.numerator}/{weight.denominator}" for word, weight in self.atoms}


class SupportReport(NamedTuple):
    symmetric: bool
    max_height: int
    generating: str


def check_support(params, mu):
    """Support symmetry, maximal height and a sufficient generation test."""
    forms = {reduce(params, word) for word in mu.words}
    symmetric = all(invert(params, nf) in forms for nf in forms)
    letters = {generator_of(params, word) for word in mu.words}
    has_b = bool(letters & {B, B_INV})
    has_t = bool(letters & {T, T_INV})
    generating = "yes" if symmetric and has_b and has_t else "unknown"
    return SupportReport(symmetric, mu.max_height(params), generating)
