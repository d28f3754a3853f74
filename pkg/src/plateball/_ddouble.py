"""Double-double (compensated) arithmetic helpers.

A value is carried as an unevaluated sum ``hi + lo`` of two floats with
``|lo| <= ulp(hi)/2``, giving roughly 32 significant decimal digits.  Only the
handful of operations the power-series evaluator needs are provided.  The
error-free transformations (two_sum, two_prod via Dekker splitting) are the
textbook ones; no FMA is assumed.
"""

from __future__ import annotations

import math

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free sum: returns (s, e) with s = fl(a+b) and a+b = s+e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def two_prod(a: float, b: float) -> tuple[float, float]:
    """Error-free product via Dekker splitting."""
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _fast_two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free sum assuming |a| >= |b| (or a == 0)."""
    s = a + b
    e = b - (s - a)
    return s, e


def dd_add(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    # accurate variant: the low parts get their own error-free sum, so the
    # relative error stays ~2^-106 even when the high parts cancel exactly
    sh, sl = two_sum(xh, yh)
    th, tl = two_sum(xl, yl)
    c = sl + th
    vh, vl = _fast_two_sum(sh, c)
    hi, lo = _fast_two_sum(vh, tl + vl)
    return hi, lo


def dd_mul(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    ph, pe = two_prod(xh, yh)
    pe += xh * yl + xl * yh
    hi, lo = two_sum(ph, pe)
    return hi, lo


def dd_mul_float(xh: float, xl: float, c: float) -> tuple[float, float]:
    ph, pe = two_prod(xh, c)
    pe += xl * c
    hi, lo = two_sum(ph, pe)
    return hi, lo


def dd_div(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    q1 = xh / yh
    # remainder x - q1*y, in double-double
    ph, pe = two_prod(q1, yh)
    rh, rl = dd_add(xh, xl, -ph, -pe - q1 * yl)
    q2 = (rh + rl) / yh
    hi, lo = two_sum(q1, q2)
    return hi, lo


def dd_div_float(xh: float, xl: float, c: float) -> tuple[float, float]:
    q1 = xh / c
    ph, pe = two_prod(q1, c)
    rh, rl = dd_add(xh, xl, -ph, -pe)
    q2 = (rh + rl) / c
    hi, lo = two_sum(q1, q2)
    return hi, lo


def dd_sqrt(xh: float, xl: float) -> tuple[float, float]:
    """One Newton step on top of the hardware sqrt; exact enough for constants."""
    if xh == 0.0:
        return 0.0, 0.0
    y = math.sqrt(xh)
    # y1 = y + (x - y*y) / (2y)
    ph, pe = two_prod(y, y)
    rh, rl = dd_add(xh, xl, -ph, -pe)
    corr = (rh + rl) / (2.0 * y)
    hi, lo = two_sum(y, corr)
    return hi, lo


def dd_from_int(n: int) -> tuple[float, float]:
    """Exact for |n| < 2**106."""
    hi = float(n)
    lo = float(n - int(hi))
    return hi, lo


def dd_powi(xh: float, xl: float, n: int) -> tuple[float, float]:
    """x**n for integer n >= 0 by repeated squaring."""
    rh, rl = 1.0, 0.0
    bh, bl = xh, xl
    while n > 0:
        if n & 1:
            rh, rl = dd_mul(rh, rl, bh, bl)
        n >>= 1
        if n:
            bh, bl = dd_mul(bh, bl, bh, bl)
    return rh, rl


# pi to double-double precision (second limb is the classic correction term)
PI_HI = 3.141592653589793
PI_LO = 1.2246467991473532e-16
