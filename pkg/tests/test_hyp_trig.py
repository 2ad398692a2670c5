import math
import random
import time

import pytest

from lamtrack.errors import DomainError, Infeasible
from lamtrack.hyp_trig import (
    hexagon_orthogeodesic,
    horocyclic_to_hyperbolic,
    lambert_max_depth,
    pentagon_solve,
    right_triangle_hypotenuse,
    safe_acosh,
)

# Frozen oracle values (computed once from the defining formulas by hand
# calculation and double-checked with high-precision arithmetic).
ACOSH_2 = 1.3169578969248166
ACOSH_1_5 = 0.9624236501192069
ATANH_0_625 = 0.7331685343967135
HYPOT_HALF_HALF = 0.7212077167133573
LAMBERT_AT_ATANH_HALF = 1.5301353973457812
LOG_4 = 1.3862943611198906
HORO_HALF = 0.4949329230945269


def hexagon_residual(a, b, c, u):
    num = math.cosh(c) + math.cosh(a) * math.cosh(b)
    den = math.sinh(a) * math.sinh(b)
    lhs = math.cosh(u)
    rhs = num / den
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def test_hexagon_symmetric_examples():
    x = ACOSH_2
    assert hexagon_orthogeodesic(x, x, x) == pytest.approx(ACOSH_2, abs=1e-12)
    y = math.acosh(3.0)
    assert hexagon_orthogeodesic(y, y, y) == pytest.approx(ACOSH_1_5, abs=1e-12)


def test_hexagon_symmetry_in_first_two_args():
    a, b, c = 0.7, 1.9, 1.1
    assert hexagon_orthogeodesic(a, b, c) == hexagon_orthogeodesic(b, a, c)


def test_hexagon_rejects_nonpositive():
    for bad in [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (1.0, 1.0, 0.0)]:
        with pytest.raises(DomainError):
            hexagon_orthogeodesic(*bad)


def test_hexagon_monotonicity():
    rng = random.Random(7)
    h = 1e-6
    for _ in range(10):
        a = rng.uniform(0.2, 5.0)
        b = rng.uniform(0.2, 5.0)
        c = rng.uniform(0.2, 5.0)
        u = hexagon_orthogeodesic(a, b, c)
        assert hexagon_orthogeodesic(a + h, b, c) < u
        assert hexagon_orthogeodesic(a, b + h, c) < u
        assert hexagon_orthogeodesic(a, b, c + h) > u


def test_pentagon_example():
    x = pentagon_solve(math.atanh(0.8), ACOSH_2)
    assert x == pytest.approx(ATANH_0_625, abs=1e-12)


def test_pentagon_infeasible():
    with pytest.raises(Infeasible):
        pentagon_solve(math.atanh(0.4), math.acosh(1.1))


def test_right_triangle_degenerate_leg():
    for a in [0.3, 1.0, 7.5]:
        assert right_triangle_hypotenuse(a, 0.0) == pytest.approx(a, abs=1e-12)
        assert right_triangle_hypotenuse(0.0, a) == pytest.approx(a, abs=1e-12)


def test_right_triangle_examples():
    leg = math.acosh(math.sqrt(2.0))
    assert right_triangle_hypotenuse(leg, leg) == pytest.approx(ACOSH_2, abs=1e-12)
    assert right_triangle_hypotenuse(0.5, 0.5) == pytest.approx(
        HYPOT_HALF_HALF, abs=1e-12
    )


def test_right_triangle_inequalities():
    rng = random.Random(11)
    for _ in range(50):
        a = rng.uniform(0.05, 6.0)
        b = rng.uniform(0.05, 6.0)
        c = right_triangle_hypotenuse(a, b)
        assert c > max(a, b)
        assert c > 0.5 * (a + b)


def test_right_triangle_rejects_negative():
    with pytest.raises(DomainError):
        right_triangle_hypotenuse(-0.1, 1.0)


def test_lambert_example_and_minimum():
    assert lambert_max_depth(math.atanh(0.5)) == pytest.approx(
        LAMBERT_AT_ATANH_HALF, abs=1e-12
    )
    a_min = math.atanh(1.0 / math.sqrt(2.0))
    assert lambert_max_depth(a_min) == pytest.approx(LOG_4, abs=1e-12)


def test_lambert_unimodal():
    a_min = math.atanh(1.0 / math.sqrt(2.0))
    lo, hi = 0.1, 6.0
    v_min = lambert_max_depth(a_min)
    assert lambert_max_depth(lo) > v_min
    assert lambert_max_depth(hi) > v_min
    # decreasing left of the minimum, increasing right of it
    grid_left = [lo + (a_min - lo) * k / 8 for k in range(9)]
    vals_left = [lambert_max_depth(a) for a in grid_left]
    assert all(x > y for x, y in zip(vals_left, vals_left[1:]))
    grid_right = [a_min + (hi - a_min) * k / 8 for k in range(9)]
    vals_right = [lambert_max_depth(a) for a in grid_right]
    assert all(x < y for x, y in zip(vals_right, vals_right[1:]))


def test_horocyclic_examples():
    assert horocyclic_to_hyperbolic(1.0) == pytest.approx(ACOSH_1_5, abs=1e-12)
    assert horocyclic_to_hyperbolic(0.5) == pytest.approx(HORO_HALF, abs=1e-12)


def test_horocyclic_small_ratio_tends_to_one():
    for s in [1e-3, 1e-5, 1e-7]:
        assert horocyclic_to_hyperbolic(s) / s == pytest.approx(1.0, abs=1e-5)


def test_horocyclic_domain():
    with pytest.raises(DomainError):
        horocyclic_to_hyperbolic(0.0)
    with pytest.raises(DomainError):
        horocyclic_to_hyperbolic(-0.2)
    with pytest.raises(DomainError):
        horocyclic_to_hyperbolic(1.5)


def test_safe_acosh_clamps_near_one():
    assert safe_acosh(1.0 - 1e-12) == 0.0
    with pytest.raises(DomainError):
        safe_acosh(0.5)


def test_residuals_random_sweep():
    rng = random.Random(42)
    t0 = time.perf_counter()
    for _ in range(2500):
        a = rng.uniform(0.05, 20.0)
        b = rng.uniform(0.05, 20.0)
        c = rng.uniform(0.05, 20.0)
        u = hexagon_orthogeodesic(a, b, c)
        assert hexagon_residual(a, b, c, u) < 1e-12

        hyp = right_triangle_hypotenuse(a, b)
        rel = abs(math.cosh(hyp) - math.cosh(a) * math.cosh(b))
        assert rel / (math.cosh(a) * math.cosh(b)) < 1e-12

        d = lambert_max_depth(a)
        y0 = math.tanh(a) / math.cosh(a)
        assert abs(math.exp(d) * y0 - 2.0) / 2.0 < 1e-12

        prod = math.tanh(a) * math.cosh(b)
        if prod > 1.0 + 1e-9:
            x = pentagon_solve(a, b)
            assert abs(prod * math.tanh(x) - 1.0) < 1e-12

        s = rng.uniform(1e-4, 1.0)
        h = horocyclic_to_hyperbolic(s)
        assert abs(2.0 * math.sinh(0.5 * h) - s) / s < 1e-12
    assert time.perf_counter() - t0 < 5.0
