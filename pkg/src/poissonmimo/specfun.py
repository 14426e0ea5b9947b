"""Special functions used by the closed-form SIR results.

Only the slice actually needed is implemented: the Gauss hypergeometric
function 2F1 for real parameters and a real argument in [0, 1), plus the
sin/csc helpers evaluated at 2*pi/alpha.
"""

from __future__ import annotations

import math

from .errors import NumericError, ParameterError

# Crossover between the direct series and the z->1 transformation.  Both
# converge on [0.85, 0.95]; 0.9 balances their rates.
_NEAR_ONE_CROSSOVER = 0.9
_SERIES_TOL = 1e-15
_MAX_TERMS = 2_000_000


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for real parameters and 0 <= z < 1.

    Uses the defining power series for z below 0.9 and the linear z->1
    transformation above, which converges fast whenever c - a - b > 0 and
    is exactly the regime the SIR fixed point lives in.
    """
    if c <= 0 and c == int(c):
        raise ParameterError("c must not be a non-positive integer")
    if not 0.0 <= z < 1.0:
        raise ParameterError(f"argument must lie in [0, 1), got {z}")
    if z == 0.0:
        return 1.0
    if z < _NEAR_ONE_CROSSOVER:
        return _series(a, b, c, z)
    return _near_one_transform(a, b, c, z)


def _series(a: float, b: float, c: float, z: float) -> float:
    term = 1.0
    total = 1.0
    for n in range(_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        total += term
        if abs(term) <= _SERIES_TOL * abs(total):
            return total
    raise NumericError(f"2F1 series did not converge at z={z}")


def _near_one_transform(a: float, b: float, c: float, z: float) -> float:
    # 2F1(a,b;c;z) = G1 * 2F1(a,b;a+b-c+1;1-z)
    #              + G2 * (1-z)^(c-a-b) * 2F1(c-a,c-b;c-a-b+1;1-z)
    s = c - a - b
    if abs(s - round(s)) < 1e-9:
        raise NumericError("z->1 transformation requires non-integer c-a-b")
    w = 1.0 - z
    g1 = math.gamma(c) * math.gamma(s) / (math.gamma(c - a) * math.gamma(c - b))
    g2 = math.gamma(c) * math.gamma(-s) / (math.gamma(a) * math.gamma(b))
    return g1 * _series(a, b, 1.0 - s, w) + g2 * w**s * _series(c - a, c - b, 1.0 + s, w)


def sin_2pi_over_alpha(alpha: float) -> float:
    """sin(2*pi/alpha); positive for every path-loss exponent alpha > 2."""
    if alpha <= 2:
        raise ParameterError("alpha must exceed 2")
    return math.sin(2.0 * math.pi / alpha)


def csc_2pi_over_alpha(alpha: float) -> float:
    """csc(2*pi/alpha), guarded against the alpha -> 2 blow-up."""
    s = sin_2pi_over_alpha(alpha)
    if s < 1e-300:
        raise NumericError("csc(2*pi/alpha) overflows this close to alpha = 2")
    return 1.0 / s
