"""Pruning mathematics for both searches.

Hard-constraint quantities (feasibility, the falling-list prefix bound and
its terminating condition) are exact rationals. The soft bound contains an
irrational minimum of ``g``; it is replaced by a rational lower bound on
the square root, which keeps the bound sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .rulelist import ONE, ZERO, PrefixState, as_fraction, positive_part, threshold

INF = math.inf
_SQRT_BITS = 64


@dataclass(frozen=True)
class BoundInputs:
    tilde_pos: int
    tilde_neg: int
    last_alpha: Fraction
    min_alpha: Fraction
    tilde_alpha: Fraction
    prefix_objective: Fraction
    n: int

    @classmethod
    def from_prefix(cls, prefix: PrefixState, C, C1=None) -> "BoundInputs":
        """Bound inputs for ``prefix``; with ``C1`` the prefix objective is the soft one.

        When the prefix captures every row the remaining proportion is taken
        to be ``min_alpha``, which makes the empty else clause cost nothing.
        """
        objective = prefix.objective(C) if C1 is None else prefix.soft_objective(C, C1)
        tilde = prefix.tilde_alpha
        return cls(
            tilde_pos=prefix.tilde_pos,
            tilde_neg=prefix.tilde_neg,
            last_alpha=prefix.last_alpha,
            min_alpha=prefix.min_alpha,
            tilde_alpha=prefix.min_alpha if tilde is None else tilde,
            prefix_objective=objective,
            n=prefix.n,
        )


def is_feasible(inputs: BoundInputs) -> bool:
    """Whether some compatible falling list extends the prefix.

    Integer form of ``n~- >= (1/alpha_last - 1) * n~+``.
    """
    p, q = inputs.last_alpha.numerator, inputs.last_alpha.denominator
    return inputs.tilde_neg * p >= (q - p) * inputs.tilde_pos


def passes_necessary_condition(alpha: Fraction, w) -> bool:
    """A rule in an optimal falling list must have alpha > 1/(1+w)."""
    alpha = as_fraction(alpha)
    return alpha.numerator * (1 + as_fraction(w)) > alpha.denominator


def _one_more_rule_cost(inputs: BoundInputs, alpha: Fraction) -> Fraction:
    # (1/alpha - 1) * n~+ / n, unbounded when a zero-proportion rule leaves positives
    if alpha == 0:
        return INF if inputs.tilde_pos else ZERO
    return (alpha.denominator - alpha.numerator) * Fraction(inputs.tilde_pos, alpha.numerator * inputs.n)


def prefix_bound_frl(inputs: BoundInputs, w, C) -> Fraction:
    """Lower bound on L over all compatible falling lists starting with a feasible prefix."""
    w, C = as_fraction(w), as_fraction(C)
    n = inputs.n
    more = _one_more_rule_cost(inputs, inputs.last_alpha) + C if inputs.tilde_pos else C
    return inputs.prefix_objective + min(more, w * inputs.tilde_pos / n, Fraction(inputs.tilde_neg, n))


def should_terminate(inputs: BoundInputs, w, C) -> bool:
    """True when closing the prefix immediately already attains the prefix bound."""
    w, C = as_fraction(w), as_fraction(C)
    n = inputs.n
    more = _one_more_rule_cost(inputs, inputs.last_alpha) if inputs.tilde_pos else ZERO
    return C >= min(w * inputs.tilde_pos / n, Fraction(inputs.tilde_neg, n)) - more


def _g(beta: Fraction, tilde_pos: int, n: int, C: Fraction, C1: Fraction, min_alpha: Fraction) -> Fraction:
    return (1 / beta - 1) * Fraction(tilde_pos, n) + C + C1 * (beta - min_alpha)


def sqrt_lower(x: Fraction, bits: int = _SQRT_BITS) -> Fraction:
    """A rational r with r <= sqrt(x) < r + 2**-bits / x.denominator."""
    if x < 0:
        raise ValueError("negative argument")
    num, den = x.numerator, x.denominator
    return Fraction(math.isqrt(num * den << (2 * bits)), den << bits)


def g_infimum(tilde_pos: int, n: int, C, C1, zeta, min_alpha) -> Fraction:
    """Infimum over zeta < beta <= 1 of (1/beta - 1) n~+/n + C + C1 (beta - alpha_min).

    The interior minimizer is beta* = sqrt(n~+ / (C1 n)); there the value is
    2 sqrt(C1 n~+ / n) - n~+/n + C - C1 alpha_min, returned as a rational
    lower bound accurate to about 2**-64.
    """
    C, C1, zeta, min_alpha = map(as_fraction, (C, C1, zeta, min_alpha))
    if C1 <= 0:
        raise ValueError("C1 must be positive for the analytic infimum")
    if not 0 <= zeta < 1:
        raise ValueError("zeta must lie in [0, 1)")
    beta_sq = Fraction(tilde_pos, n) / C1
    if zeta * zeta < beta_sq <= 1:
        ratio = Fraction(tilde_pos, n)
        return 2 * sqrt_lower(C1 * ratio) - ratio + C - C1 * min_alpha
    if zeta == 0:
        if tilde_pos == 0:
            # g is linear and increasing; the infimum is the limit at 0
            return C - C1 * min_alpha
        # here beta* > 1, so g decreases all the way to beta = 1
        return _g(ONE, tilde_pos, n, C, C1, min_alpha)
    return min(_g(zeta, tilde_pos, n, C, C1, min_alpha), _g(ONE, tilde_pos, n, C, C1, min_alpha))


def soft_branches(inputs: BoundInputs, w, C, C1) -> tuple:
    """The four candidate increments over the prefix objective (math.inf when empty)."""
    w, C, C1 = as_fraction(w), as_fraction(C), as_fraction(C1)
    n = inputs.n
    a_min, a_tilde = inputs.min_alpha, inputs.tilde_alpha
    overshoot = C1 * positive_part(a_tilde - a_min)
    pos_cost = w * inputs.tilde_pos / n

    if a_min == 0:
        first = INF if inputs.tilde_pos else C + overshoot
    else:
        first = _one_more_rule_cost(inputs, a_min) + C + overshoot
        if a_tilde >= a_min:
            first += pos_cost

    zeta = max(a_min, a_tilde, threshold(w))
    if zeta >= 1:
        second = INF
    elif C1 == 0:
        # g is non-increasing without the C1 term: the infimum sits at beta = 1
        second = C
    else:
        second = g_infimum(inputs.tilde_pos, n, C, C1, zeta, a_min)

    third = pos_cost + overshoot
    fourth = Fraction(inputs.tilde_neg, n) + overshoot
    return first, second, third, fourth


def prefix_bound_soft(inputs: BoundInputs, w, C, C1) -> Fraction:
    """Lower bound on the softly falling objective of any compatible list starting with the prefix."""
    return inputs.prefix_objective + min(soft_branches(inputs, w, C, C1))
