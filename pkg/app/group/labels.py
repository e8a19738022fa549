import math
from sympy import multiplicity

# Orbit cardinalities are positive ints or INFINITY.
INFINITY = math.inf


def is_infinite(label):
    return label == INFINITY


def check_label(label):
    """True for a positive integer or infinity."""
    if is_infinite(label):
        return True
    return isinstance(label, int) and not isinstance(label, bool) and label >= 1


def cap(label, k):
    """N ∧ k, with ∞ ∧ k = |k|."""
    if is_infinite(label):
        return abs(k)
    return math.gcd(label, k)


def coset_size(label, k):
    """N / (N ∧ k); infinite for an infinite orbit."""
    if is_infinite(label):
        return INFINITY
    return label // math.gcd(label, k)


def valuation(value, prime):
    """Exponent of `prime` in `value`; infinite for 0 and for ∞."""
    if is_infinite(value) or value == 0:
        return INFINITY
    return multiplicity(prime, abs(value))


def format_label(label):
    return "inf" if is_infinite(label) else str(label)
