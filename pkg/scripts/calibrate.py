"""One-shot development calibration for the sign conventions in surface.py.

Searches the small discrete spaces of orientation signs in the pants
boundary relation, verifies seam-chart closure and the cusp parabolic pins,
and prints the values to freeze into the module constants. Run from the
repository root:

    python3 scripts/calibrate.py
"""

import itertools
import math
import sys

sys.path.insert(0, "src")

from lamtrack import _matrix as mat
from lamtrack import surface
from lamtrack.surface import (
    CUSP, Cuff, PairOfPants, _apply_real, _parabolic_pin, _perp_feet,
    _perp_to_axis, _seam_matrix_next, _seam_matrix_skip,
)


def is_pm_identity(m, tol=1e-9):
    return mat.psl_close(mat.unit_det(m), mat.IDENT, tol)


def search_cuffs3():
    lengths = [1.7, 2.9, 0.8]
    x = [v / 2 for v in lengths]
    from lamtrack.hyp_trig import hexagon_orthogeodesic
    u = {}
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        u[(i, j)] = hexagon_orthogeodesic(x[i], x[j], x[k])
    s01 = _seam_matrix_next(u[(0, 1)], x[1])
    s12 = _seam_matrix_next(u[(1, 2)], x[2])
    s20 = _seam_matrix_next(u[(2, 0)], x[0])
    s02 = _seam_matrix_skip(x[0], u[(2, 0)])
    closure = mat.chain(s01, s12, s20)
    print("hexagon closure S01*S12*S20 = +-I:", is_pm_identity(closure),
          closure)
    both = mat.chain(s01, s12)
    print("S02 vs S01*S12 agree up to sign:",
          mat.psl_close(mat.unit_det(s02), mat.unit_det(both), 1e-9))
    to_ref = {0: mat.IDENT, 1: s01, 2: s02}
    winners = []
    for signs in itertools.product((1, -1), repeat=3):
        xs = [mat.chain(to_ref[s], mat.trans(signs[s] * lengths[s]),
                        mat.sl2_inv(to_ref[s])) for s in range(3)]
        prod = mat.chain(*xs)
        if is_pm_identity(prod, 1e-7):
            winners.append(signs)
    print("cuffs3 winning sign patterns:", winners)
    return winners


def search_cusp1():
    lp, lq = 1.9, 2.6
    xp, xq = lp / 2, lq / 2
    num = 1.0 + math.cosh(xp) * math.cosh(xq)
    den = math.sinh(xp) * math.sinh(xq)
    u_pq = math.acosh(num / den)
    s_pq = mat.chain(mat.rot(math.pi / 2), mat.trans(u_pq),
                     mat.rot(math.pi / 2))
    winners = []
    for signs in itertools.product((1, -1), repeat=2):
        xa = mat.trans(signs[0] * lp)
        xb = mat.chain(s_pq, mat.trans(signs[1] * lq), mat.sl2_inv(s_pq))
        t = mat.tr(mat.mul(xa, xb))
        if abs(abs(t) - 2.0) < 1e-7:
            winners.append((signs, t))
    print("cusp1 winning sign patterns (|tr(Xp*Xq)| = 2):", winners)
    # with the first winner, inspect the parabolic and the self-seam
    signs = winners[0][0]
    xa = mat.trans(signs[0] * lp)
    xb = mat.chain(s_pq, mat.trans(signs[1] * lq), mat.sl2_inv(s_pq))
    para = mat.sl2_inv(mat.mul(xa, xb))
    e1 = _apply_real(para, 0.0)
    e2 = _apply_real(para, math.inf)
    print("cusp1 parabolic image of axis endpoints:", e1, e2)
    fp = (para[0] - para[3]) / (2 * para[2])
    print("cusp1 parabolic fixed point (expect negative):", fp)
    d, off = _perp_to_axis(e1, e2)
    foot_axis, foot_other = _perp_feet(e1, e2)
    pulled = mat.apply_cplx(mat.sl2_inv(para), foot_other)
    print("cusp1 self-seam length:", d, " axis foot offset:", off)
    print("cusp1 other foot pulled back:", pulled,
          " offset:", math.log(abs(pulled)),
          " (expect -axis offset; real part ~0)")


def check_cusp2():
    length = 2.2
    pin = _parabolic_pin(length)
    x =  mat.trans(length)
    t = mat.tr(mat.mul(x, pin))
    print("cusp2 tr(T(l)*P1) (expect -2):", t)
    print("cusp2 det P1 (expect 1):", mat.det(pin))
    e1 = _apply_real(pin, 0.0)
    e2 = _apply_real(pin, math.inf)
    d, off = _perp_to_axis(e1, e2)
    print("cusp2 self-seam length:", d, " formula:",
          2.0 * math.atanh(1.0 / math.cosh(length / 4.0)))
    print("cusp2 axis foot offset (expect 0):", off)
    foot_axis, foot_other = _perp_feet(e1, e2)
    pulled = mat.apply_cplx(mat.sl2_inv(pin), foot_other)
    print("cusp2 other foot pulled back:", pulled, " offset:",
          math.log(abs(pulled)), " (expect +-l/2 =", length / 2, ")")
    p2_fp_mat = mat.sl2_inv(mat.mul(x, pin))
    fp = (p2_fp_mat[0] - p2_fp_mat[3]) / (2 * p2_fp_mat[2])
    print("cusp2 second cusp fixed point (expect negative):", fp)


def check_gluing():
    w = surface.gluing_map(2.0, 0.25)
    sq = mat.mul(w, w)
    print("gluing involution W^2 = -I:", sq)
    print("W sends i to (expect e^{0.5} i):", mat.apply_cplx(w, 1j))


if __name__ == "__main__":
    search_cuffs3()
    search_cusp1()
    check_cusp2()
    check_gluing()
