"""Angular-momentum algebra for hyperfine dipole couplings.

Everything here works with angular momenta given as integers or
half-integers (floats such as 1.5 are fine).  The 6-j symbol is
evaluated with the Racah single-sum formula using exact rational
arithmetic, so results are accurate to the final float rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..errors import DomainError

__all__ = ["wigner_6j", "relative_line_strength", "decay_branching"]


def _twice(j, name: str) -> int:
    """Return 2*j as an exact int, validating half-integer input."""
    tj = 2.0 * float(j)
    if tj < 0 or abs(tj - round(tj)) > 1e-9:
        raise DomainError(f"{name} must be a non-negative half-integer, got {j!r}")
    return int(round(tj))


def _triangle_ok(ta: int, tb: int, tc: int) -> bool:
    # arguments are doubled j values; parity condition makes the sum even
    return (
        abs(ta - tb) <= tc <= ta + tb
        and (ta + tb + tc) % 2 == 0
    )


@lru_cache(maxsize=4096)
def _tri_factor(ta: int, tb: int, tc: int) -> Fraction:
    """Squared triangle coefficient Delta(a,b,c)^2 as an exact Fraction."""
    f = math.factorial
    return Fraction(
        f((ta + tb - tc) // 2) * f((ta - tb + tc) // 2) * f((-ta + tb + tc) // 2),
        f((ta + tb + tc) // 2 + 1),
    )


@lru_cache(maxsize=8192)
def _wigner_6j_doubled(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int) -> float:
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    if not all(_triangle_ok(*t) for t in triads):
        return 0.0

    f = math.factorial
    tri = Fraction(1)
    for t in triads:
        tri *= _tri_factor(*t)

    # Racah sum over t; bounds from the non-negativity of every factorial
    sums3 = [sum(t) // 2 for t in triads]
    quad = (
        (tj1 + tj2 + tj4 + tj5) // 2,
        (tj2 + tj3 + tj5 + tj6) // 2,
        (tj3 + tj1 + tj6 + tj4) // 2,
    )
    total = Fraction(0)
    for t in range(max(sums3), min(quad) + 1):
        num = f(t + 1)
        den = 1
        for s in sums3:
            den *= f(t - s)
        for q in quad:
            den *= f(q - t)
        term = Fraction(num, den)
        total += -term if t % 2 else term

    # tri * total^2 is an exact rational, so one sqrt keeps full precision
    magnitude = math.sqrt(float(tri * total * total))
    return math.copysign(magnitude, float(total))


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """6-j symbol {j1 j2 j3; j4 j5 j6}; zero when a triad is forbidden."""
    args = [_twice(j, f"j{i+1}") for i, j in enumerate((j1, j2, j3, j4, j5, j6))]
    return _wigner_6j_doubled(*args)


def relative_line_strength(F_lower, F_upper, J_lower, J_upper, I) -> float:
    """Signed amplitude of one hyperfine component of a J -> J' dipole line.

    The value is the ratio <F'||d||F> / <J'||d||J> for an unpolarized
    population, carrying the recoupling sign.  Squares summed over
    F_upper at fixed F_lower give 1, so squared values are the relative
    absorption strengths of the resolved components.
    """
    tFl, tFu = _twice(F_lower, "F_lower"), _twice(F_upper, "F_upper")
    tJl, tJu, tI = _twice(J_lower, "J_lower"), _twice(J_upper, "J_upper"), _twice(I, "I")
    if not (_triangle_ok(tFl, tJl, tI) and _triangle_ok(tFu, tJu, tI)):
        return 0.0
    six = _wigner_6j_doubled(tJl, tJu, 2, tFu, tFl, tI)
    if six == 0.0:
        return 0.0
    phase = -1.0 if ((tFu + tJl) // 2 + 1 + tI // 2) % 2 else 1.0
    return phase * math.sqrt((tFu + 1) * (tJl + 1)) * six


def decay_branching(F_upper, F_lower, J_upper, J_lower, I) -> float:
    """Branching ratio of spontaneous decay F_upper -> F_lower.

    Sums to 1 over the lower hyperfine manifold.
    """
    tFl, tFu = _twice(F_lower, "F_lower"), _twice(F_upper, "F_upper")
    tJl, tJu, tI = _twice(J_lower, "J_lower"), _twice(J_upper, "J_upper"), _twice(I, "I")
    six = _wigner_6j_doubled(tJu, tJl, 2, tFl, tFu, tI)
    return (tFl + 1) * (tJu + 1) * six * six
