"""Closed-form solvers for right-angled hyperbolic polygons.

All lengths are hyperbolic. Inverse hyperbolic functions guard their
domains: an argument within eps() of the boundary is clamped onto it,
anything farther out raises DomainError.
"""

import math

from ._tol import eps
from .errors import DomainError, Infeasible


def safe_acosh(x: float) -> float:
    """arccosh with clamping of arguments slightly below 1."""
    if x < 1.0:
        if x < 1.0 - eps():
            raise DomainError(f"acosh argument {x} below domain")
        x = 1.0
    return math.acosh(x)


def safe_atanh(x: float) -> float:
    """arctanh; arguments at or beyond +-1 are rejected."""
    if abs(x) >= 1.0:
        raise DomainError(f"atanh argument {x} outside open unit interval")
    return math.atanh(x)


def hexagon_orthogeodesic(a: float, b: float, c: float) -> float:
    """Side of a right-angled hexagon between the sides of lengths a and b.

    In a right-angled hexagon with alternating side lengths a, u, b, ., c, .
    the side u joining a and b satisfies

        cosh u = (cosh c + cosh a * cosh b) / (sinh a * sinh b),

    where c is the side opposite u. Symmetric in a and b; defined for all
    positive inputs.
    """
    if a <= 0 or b <= 0 or c <= 0:
        raise DomainError("hexagon sides must be positive")
    num = math.cosh(c) + math.cosh(a) * math.cosh(b)
    den = math.sinh(a) * math.sinh(b)
    return safe_acosh(num / den)


def pentagon_solve(l2: float, half_cuff: float) -> float:
    """Side x of a right-angled pentagon with tanh(l2)*cosh(half_cuff)*tanh(x) = 1.

    Raises Infeasible when tanh(l2)*cosh(half_cuff) <= 1, in which case no
    such pentagon exists.
    """
    if l2 <= 0 or half_cuff < 0:
        raise DomainError("pentagon data must be positive")
    product = math.tanh(l2) * math.cosh(half_cuff)
    if product <= 1.0:
        raise Infeasible(f"tanh(l2)*cosh(half_cuff) = {product} <= 1")
    return safe_atanh(1.0 / product)


def right_triangle_hypotenuse(a: float, b: float) -> float:
    """Hypotenuse of a right hyperbolic triangle with legs a and b.

    cosh c = cosh a * cosh b. Accepts zero legs: the hypotenuse then equals
    the other leg.
    """
    if a < 0 or b < 0:
        raise DomainError("triangle legs must be nonnegative")
    return safe_acosh(math.cosh(a) * math.cosh(b))


def lambert_max_depth(a: float) -> float:
    """Peak depth log(2 / y0) of the symmetric Lambert configuration of size a.

    Here y0 = sqrt(r^2 - r^4) with r = tanh(a), evaluated in the cancellation
    free form y0 = tanh(a) / cosh(a). Unimodal in a with minimum value log 4
    at tanh(a) = 1/sqrt(2).
    """
    if a <= 0:
        raise DomainError("size parameter must be positive")
    return math.log(2.0) - math.log(math.tanh(a)) + math.log(math.cosh(a))


def horocyclic_to_hyperbolic(s: float) -> float:
    """Geodesic distance between the endpoints of a horocyclic arc of length s.

    Valid for 0 < s <= 1 (embedded arcs); equals
    log((sqrt(4 + s^2) + s) / (sqrt(4 + s^2) - s)), i.e. 2 asinh(s / 2).
    """
    if s <= 0:
        raise DomainError("horocyclic length must be positive")
    if s > 1.0:
        raise DomainError("horocyclic length must be at most 1")
    root = math.sqrt(4.0 + s * s)
    return math.log((root + s) / (root - s))
