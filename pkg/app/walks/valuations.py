import logging
from typing import NamedTuple, Optional
from sympy import isprime
from app.dictionary.word_syntax import B, B_INV, T, T_INV
from app.errors import BadParams, HypothesisViolated
from app.group.labels import valuation

logger = logging.getLogger("Walks")


class ValuationTrace(NamedTuple):
    """
    q-adic valuations of the orbit labels met along a walk. `values[i]` is
    the closed form after i steps and `recursion[i]` the same quantity
    obtained step by step from the Transfer Equation.
    """
    prime: int
    start: int
    h_plus: tuple
    h_minus: tuple
    values: tuple
    recursion: tuple
    violation_index: Optional[int] = None


def transfer_valuation_step(value, letter, v_m, v_n):
    """Valuation of the next label: t gives v - min(v, v_n) + v_m, t^-1 the mirror."""
    if letter == T:
        return value - min(value, v_n) + v_m
    if letter == T_INV:
        return value - min(value, v_m) + v_n
    return value


def valuation_trace(params, prime, start_label, trace, strict=False):
    """
    Exact valuations (h+ - h-)(v_q(m) - v_q(n)) + v_q(N0) along a trace of
    single letters. Requires v_q(m) > v_q(n) and v_q(N0) > v_q(m). The trace
    stops at the first step where h+ < h- or an increment is not a letter;
    with `strict` that step raises HypothesisViolated instead.
    """
    if not isprime(prime):
        raise BadParams(f"{prime} is not prime")
    v_m = valuation(params.m, prime)
    v_n = valuation(params.n, prime)
    start = valuation(start_label, prime)
    if not v_m > v_n:
        raise HypothesisViolated(0, f"need v_{prime}(m) > v_{prime}(n)")
    if not start > v_m:
        raise HypothesisViolated(0, f"need v_{prime}(N0) > v_{prime}(m)")

    plus = minus = 0
    h_plus, h_minus = [0], [0]
    values, recursion = [start], [start]
    violation = None
    for index, letter in enumerate(trace.increments, start=1):
        if letter not in (B, B_INV, T, T_INV):
            violation = index
            break
        if letter == T:
            plus += 1
        elif letter == T_INV:
            minus += 1
        if plus < minus:
            violation = index
            break
        h_plus.append(plus)
        h_minus.append(minus)
        values.append((plus - minus) * (v_m - v_n) + start)
        recursion.append(transfer_valuation_step(recursion[-1], letter, v_m, v_n))

    if violation is not None:
        logger.debug(f"Valuation trace truncated at step {violation}")
        if strict:
            raise HypothesisViolated(violation)

    return ValuationTrace(
        prime=prime,
        start=start,
        h_plus=tuple(h_plus),
        h_minus=tuple(h_minus),
        values=tuple(values),
        recursion=tuple(recursion),
        violation_index=violation,
    )
