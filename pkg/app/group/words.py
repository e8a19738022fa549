import logging
from dataclasses import dataclass
from app.dictionary.word_syntax import (
    B, B_INV, T, T_INV, INVERSE_LETTER, IDENTITY_TEXT
)
from app.errors import BadParams

logger = logging.getLogger("NormalForms")


@dataclass(frozen=True)
class Params:
    """The pair (m, n) of BS(m,n) = <b, t | t b^m t^-1 = b^n>."""
    m: int
    n: int

    def __post_init__(self):
        if abs(self.m) < 2 or abs(self.n) < 2:
            raise BadParams(f"need |m| >= 2 and |n| >= 2, got m={self.m} n={self.n}")

    @property
    def unimodular(self):
        return abs(self.m) == abs(self.n)

    def __str__(self):
        return f"BS({self.m},{self.n})"


@dataclass(frozen=True)
class NormalForm:
    """
    b^leading t^e1 b^k1 ... t^er b^kr, stored as leading and the blocks (e_i, k_i).

    After t the exponent lies in [0, |m|), after t^-1 in [0, |n|), and no
    block t^e b^0 is followed by t^-e.
    """
    leading: int = 0
    blocks: tuple = ()

    @property
    def is_identity(self):
        return self.leading == 0 and not self.blocks

    def syllables(self):
        """Yields ('b', k) and ('t', e) chunks in reading order, skipping b^0."""
        if self.leading:
            yield (B, self.leading)
        for sign, exponent in self.blocks:
            yield (T, sign)
            if exponent:
                yield (B, exponent)

    def __str__(self):
        if self.is_identity:
            return IDENTITY_TEXT
        parts = []
        for letter, exponent in self.syllables():
            if letter == T:
                parts.append(T if exponent == 1 else T_INV)
            elif exponent == 1:
                parts.append(B)
            else:
                parts.append(f"b^{exponent}")
        return " ".join(parts)


IDENTITY = NormalForm()


class _Reducer:
    """
    Builds a normal form by appending syllables on the right.

    Appending b^k to the last block can overflow its range; the quotient is
    pushed left through t^e (t b^(qm) = b^(qn) t) and the carry cascades
    toward the leading exponent. When neighbouring blocks have opposite signs
    the pushed amount is a multiple of the left modulus, so residues there are
    kept and no pinch can appear.
    """

    def __init__(self, params, start=IDENTITY):
        self.m = params.m
        self.n = params.n
        self.leading = start.leading
        self.blocks = [list(block) for block in start.blocks]

    def append_b(self, k):
        if not k:
            return
        if not self.blocks:
            self.leading += k
            return
        self.blocks[-1][1] += k
        self._cascade(len(self.blocks) - 1)

    def _cascade(self, index):
        while index >= 0:
            sign, exponent = self.blocks[index]
            # t b^(qm) = b^(qn) t and t^-1 b^(qn) = b^(qm) t^-1
            source, target = (self.m, self.n) if sign == 1 else (self.n, self.m)
            residue = exponent % abs(source)
            quotient = (exponent - residue) // source
            self.blocks[index][1] = residue
            if not quotient:
                return
            carry = quotient * target
            if index == 0:
                self.leading += carry
                return
            self.blocks[index - 1][1] += carry
            index -= 1

    def append_t(self, sign):
        if self.blocks and self.blocks[-1] == [-sign, 0]:
            self.blocks.pop()
        else:
            self.blocks.append([sign, 0])

    def append(self, letter, exponent=1):
        if letter in (B, B_INV):
            self.append_b(exponent if letter == B else -exponent)
        elif letter == T:
            for _ in range(exponent):
                self.append_t(1)
        elif letter == T_INV:
            for _ in range(exponent):
                self.append_t(-1)
        else:
            raise ValueError(f"unknown letter {letter!r}")

    def append_syllables(self, syllables):
        for letter, exponent in syllables:
            if letter == B:
                self.append_b(exponent)
            else:
                self.append_t(exponent)

    def result(self):
        return NormalForm(self.leading, tuple(tuple(block) for block in self.blocks))


def word_syllables(word):
    """Groups a word into ('b', k) runs and single ('t', +-1) letters."""
    syllables = []
    run = 0
    for letter in word:
        if letter == B:
            run += 1
        elif letter == B_INV:
            run -= 1
        elif letter in (T, T_INV):
            if run:
                syllables.append((B, run))
                run = 0
            syllables.append((T, 1 if letter == T else -1))
        else:
            raise ValueError(f"unknown letter {letter!r}")
    if run:
        syllables.append((B, run))
    return syllables


def reduce(params, word):
    """Normal form of the element spelled by `word` (a string over bBtT)."""
    reducer = _Reducer(params)
    reducer.append_syllables(word_syllables(word))
    return reducer.result()


def spell(nf):
    """Letter-by-letter spelling; spell(reduce(w)) reduces back to the same form."""
    parts = []
    for letter, exponent in nf.syllables():
        if letter == T:
            parts.append(T if exponent == 1 else T_INV)
        else:
            parts.append((B if exponent > 0 else B_INV) * abs(exponent))
    return "".join(parts)


def multiply(params, a, b):
    reducer = _Reducer(params, a)
    reducer.append_syllables(b.syllables())
    return reducer.result()


def product(params, words):
    """Normal form of the concatenation of several words."""
    reducer = _Reducer(params)
    for word in words:
        reducer.append_syllables(word_syllables(word))
    return reducer.result()


def inverse_syllables(syllables):
    return [(letter, -exponent) for letter, exponent in reversed(list(syllables))]


def invert(params, a):
    reducer = _Reducer(params)
    reducer.append_syllables(inverse_syllables(a.syllables()))
    return reducer.result()


def inverse_word(word):
    return "".join(INVERSE_LETTER[letter] for letter in reversed(word))


def height(nf):
    """Number of t-letters of the normal form."""
    return len(nf.blocks)


def t_count(word):
    return sum(1 for letter in word if letter in (T, T_INV))


def subwords(word):
    """All prefixes of the spelling, from the empty word to `word` itself."""
    return [word[:length] for length in range(len(word) + 1)]


def generator_of(params, word):
    """The standard generator `word` represents, or None."""
    nf = reduce(params, word)
    if not nf.blocks and abs(nf.leading) == 1:
        return B if nf.leading == 1 else B_INV
    if nf.leading == 0 and len(nf.blocks) == 1 and nf.blocks[0][1] == 0:
        return T if nf.blocks[0][0] == 1 else T_INV
    return None
