"""Small 2x2 real matrix kernel for hyperbolic isometries.

Matrices are plain tuples (a, b, c, d) in row-major order, acting on the
upper half-plane by Mobius maps z -> (a z + b) / (c z + d) and on boundary
points in homogeneous coordinates (w1, w2) ~ w1/w2 by the linear action.
Everything that matters downstream is determinant-1 (or at least
determinant-positive), and comparisons are modulo overall sign.
"""

import math

IDENT = (1.0, 0.0, 0.0, 1.0)


def mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def chain(*ms):
    """Product of matrices left to right."""
    out = IDENT
    for m in ms:
        out = mul(out, m)
    return out


def det(m):
    a, b, c, d = m
    return a * d - b * c


def tr(m):
    return m[0] + m[3]


def sl2_inv(m):
    """Inverse of a determinant-1 matrix."""
    a, b, c, d = m
    return (d, -b, -c, a)


def neg(m):
    a, b, c, d = m
    return (-a, -b, -c, -d)


def unit_det(m):
    """Rescale a positive-determinant matrix to determinant 1."""
    s = det(m)
    if s <= 0:
        raise ValueError("matrix determinant must be positive")
    r = 1.0 / math.sqrt(s)
    a, b, c, d = m
    return (a * r, b * r, c * r, d * r)


def rot(theta: float):
    """Rotation of tangent directions at i by +theta (counterclockwise)."""
    h = 0.5 * theta
    return (math.cos(h), math.sin(h), -math.sin(h), math.cos(h))


def trans(d: float):
    """Translation by d along the imaginary axis, upward for d > 0."""
    e = math.exp(0.5 * d)
    return (e, 0.0, 0.0, 1.0 / e)


J = (0.0, 1.0, -1.0, 0.0)  # rot(pi): half-turn about i


def apply_cplx(m, z: complex) -> complex:
    """Mobius action on a finite upper-half-plane point."""
    a, b, c, d = m
    return (a * z + b) / (c * z + d)


def apply_hom(m, w):
    """Linear action on a homogeneous boundary vector (w1, w2)."""
    a, b, c, d = m
    w1, w2 = w
    return (a * w1 + b * w2, c * w1 + d * w2)


def psl_close(m, n, tol: float) -> bool:
    """Equality modulo overall sign, entrywise within tol."""
    same = all(abs(x - y) <= tol for x, y in zip(m, n))
    flip = all(abs(x + y) <= tol for x, y in zip(m, n))
    return same or flip


def fixed_points(m):
    """Boundary fixed points of a hyperbolic matrix.

    Returns (attracting, repelling) as homogeneous pairs. Eigenvector for
    eigenvalue lam of [[a,b],[c,d]]: (lam - d, c) when c != 0, else
    (b, lam - a) when b != 0, else the axis is {0, inf}.
    """
    a, b, c, d = m
    t = a + d
    disc = t * t - 4.0 * det(m)
    if disc <= 0:
        raise ValueError("matrix is not hyperbolic")
    root = math.sqrt(disc)
    if t >= 0:
        lam_big = 0.5 * (t + root)
    else:
        lam_big = 0.5 * (t - root)
    lam_small = det(m) / lam_big
    if abs(lam_big) < abs(lam_small):
        lam_big, lam_small = lam_small, lam_big
    out = []
    for lam in (lam_big, lam_small):
        if abs(c) > abs(b):
            vec = (lam - d, c)
        elif b != 0.0:
            vec = (b, lam - a)
        else:
            vec = (1.0, 0.0) if abs(a - lam) < abs(d - lam) else (0.0, 1.0)
        out.append(vec)
    return out[0], out[1]


def translation_length(m) -> float:
    """Hyperbolic translation length: 2 arccosh(|tr|/2) for det 1."""
    half = abs(tr(m)) / (2.0 * math.sqrt(det(m)))
    if half <= 1.0:
        return 0.0
    return 2.0 * math.acosh(half)
