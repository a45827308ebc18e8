"""Hot inner loops: fixed-step RK4 for the three second-order equations.

Each kernel advances a second-order equation written as a first-order pair
over ``n`` output nodes with ``m`` equal substeps of size ``hs`` between
nodes.  Coefficient profiles are pre-sampled on the half-substep lattice
``x_start + j * hs / 2`` (length ``2 * m * (n - 1) + 1``), which is every
abscissa classical RK4 touches, so no Python callback runs inside the loop.

Kernels return ``(values, derivatives, bad_index)`` where ``bad_index`` is
-1 on success or the first output node at which the state stopped being
admissible (non-finite, or non-positive amplitude for the Milne kernel).
"""
import math

import numpy as np

from ._jit import njit


@njit
def rk4_linear(k2_half, y0, v0, hs, m, n):
    """y'' = -k2(x) y with complex state."""
    ys = np.empty(n, dtype=np.complex128)
    vs = np.empty(n, dtype=np.complex128)
    y = complex(y0)
    v = complex(v0)
    ys[0] = y
    vs[0] = v
    half = 0.5 * hs
    sixth = hs / 6.0
    j = 0
    for i in range(1, n):
        for _ in range(m):
            ka = k2_half[j]
            kb = k2_half[j + 1]
            kc = k2_half[j + 2]
            a_y = v
            a_v = -ka * y
            b_y = v + half * a_v
            b_v = -kb * (y + half * a_y)
            c_y = v + half * b_v
            c_v = -kb * (y + half * b_y)
            d_y = v + hs * c_v
            d_v = -kc * (y + hs * c_y)
            y = y + sixth * (a_y + 2.0 * b_y + 2.0 * c_y + d_y)
            v = v + sixth * (a_v + 2.0 * b_v + 2.0 * c_v + d_v)
            j += 2
        ys[i] = y
        vs[i] = v
        if not (math.isfinite(y.real) and math.isfinite(y.imag)
                and math.isfinite(v.real) and math.isfinite(v.imag)):
            return ys, vs, i
    return ys, vs, -1


@njit
def rk4_milne(k2_half, c2, u0, v0, hs, m, n):
    """u'' = -k2(x) u + c2 / u^3 with real state; stops if u <= 0."""
    us = np.empty(n)
    vs = np.empty(n)
    u = float(u0)
    v = float(v0)
    us[0] = u
    vs[0] = v
    half = 0.5 * hs
    sixth = hs / 6.0
    j = 0
    for i in range(1, n):
        for _ in range(m):
            ka = k2_half[j]
            kb = k2_half[j + 1]
            kc = k2_half[j + 2]
            a_u = v
            a_v = -ka * u + c2 / u ** 3
            ub = u + half * a_u
            if ub <= 0.0:
                us[i:] = np.nan
                vs[i:] = np.nan
                return us, vs, i
            b_u = v + half * a_v
            b_v = -kb * ub + c2 / ub ** 3
            uc = u + half * b_u
            if uc <= 0.0:
                us[i:] = np.nan
                vs[i:] = np.nan
                return us, vs, i
            c_u = v + half * b_v
            c_v = -kb * uc + c2 / uc ** 3
            ud = u + hs * c_u
            if ud <= 0.0:
                us[i:] = np.nan
                vs[i:] = np.nan
                return us, vs, i
            d_u = v + hs * c_v
            d_v = -kc * ud + c2 / ud ** 3
            u = u + sixth * (a_u + 2.0 * b_u + 2.0 * c_u + d_u)
            v = v + sixth * (a_v + 2.0 * b_v + 2.0 * c_v + d_v)
            j += 2
        us[i] = u
        vs[i] = v
        if not (u > 0.0 and math.isfinite(u) and math.isfinite(v)):
            return us, vs, i
    return us, vs, -1


@njit
def rk4_pendulum(c1sq, s0, v0, hs, m, n):
    """S'' = -c1^2 sin(4 S)."""
    ss = np.empty(n)
    vs = np.empty(n)
    s = float(s0)
    v = float(v0)
    ss[0] = s
    vs[0] = v
    half = 0.5 * hs
    sixth = hs / 6.0
    for i in range(1, n):
        for _ in range(m):
            a_s = v
            a_v = -c1sq * math.sin(4.0 * s)
            b_s = v + half * a_v
            b_v = -c1sq * math.sin(4.0 * (s + half * a_s))
            c_s = v + half * b_v
            c_v = -c1sq * math.sin(4.0 * (s + half * b_s))
            d_s = v + hs * c_v
            d_v = -c1sq * math.sin(4.0 * (s + hs * c_s))
            s = s + sixth * (a_s + 2.0 * b_s + 2.0 * c_s + d_s)
            v = v + sixth * (a_v + 2.0 * b_v + 2.0 * c_v + d_v)
        ss[i] = s
        vs[i] = v
        if not (math.isfinite(s) and math.isfinite(v)):
            return ss, vs, i
    return ss, vs, -1
