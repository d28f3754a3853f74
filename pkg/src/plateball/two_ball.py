"""The two-ball constraint geometry and the pivotal function F_nu.

A configuration is a pair of balls with radii a, b tied by a^d + b^d = 1.
The asymmetry factor K(a,b) couples them; on the constraint it collapses to
K = a^(d-1) / (1 + b^(d-1)).  The eigenvalue root k(a) of the roots module
is the first zero of r -> F_nu(r, a) with

    F_nu(k, a) = f_nu(k K a) + K^d f_nu(k b),

and the derivative of a -> F_nu(k, a) along the curve F_nu = 0 decomposes
into the three terms 2 k^d T1 + T2 + T3 analysed dimension by dimension in
the certificate layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .roots import DirectedValue
from .special_functions import (
    DimensionParams,
    ExtendedReal,
    f_nu,
    g_nu,
    ratio_i,
    ratio_j,
)


def _powi(x: float, n: int) -> float:
    """x**n by exponent-by-squaring (n >= 0)."""
    acc = 1.0
    base = x
    while n:
        if n & 1:
            acc *= base
        base *= base
        n >>= 1
    return acc


@dataclass(frozen=True)
class TwoBallPoint:
    """One point of the constraint a^d + b^d = 1 with its asymmetry factor."""

    params: DimensionParams
    a: float
    b: float
    K: float


def b_of_a(params: DimensionParams, a: float) -> float:
    """b(a) = (1 - a^d)^(1/d), stable near a = 1 via log1p."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if a == 0.0:
        return 1.0
    if a == 1.0:
        return 0.0
    ad = _powi(a, params.d)
    if ad >= 1.0:
        return 0.0
    return math.exp(math.log1p(-ad) / params.d)


def _K_formula(params: DimensionParams, a: float, b: float) -> float:
    d = params.d
    if a == 0.0:
        return 0.0
    A = _powi(a, d - 1)
    B = _powi(b, d - 1)
    s = (_powi(a, d) + _powi(b, d)) ** ((d - 1) / d)
    return A / (s + B)


def two_ball_point(params: DimensionParams, a: float) -> TwoBallPoint:
    """Constraint point at abscissa a: b from the volume split, K from its formula."""
    b = b_of_a(params, a)
    return TwoBallPoint(params=params, a=a, b=b, K=_K_formula(params, a, b))


def K_of(point: TwoBallPoint) -> float:
    """Asymmetry factor K(a,b) = a^(d-1) / ((a^d+b^d)^((d-1)/d) + b^(d-1))."""
    return _K_formula(point.params, point.a, point.b)


def derivatives(point: TwoBallPoint) -> tuple[float, float]:
    """(b'(a), K'(a)) along the constraint, in the A = a^(d-1), B = b^(d-1)
    notation: b' = -A/B and K' = (d-1)(b+1)K^2/(abA).  Singular at a in {0,1}."""
    a, b, K = point.a, point.b, point.K
    d = point.params.d
    if not 0.0 < a < 1.0:
        raise ValueError(f"derivatives are singular at a={a}")
    A = _powi(a, d - 1)
    B = _powi(b, d - 1)
    b_prime = -A / B
    K_prime = (d - 1) * (b + 1.0) * K * K / (a * b * A)
    return b_prime, K_prime


def F_nu(params: DimensionParams, k: float, a: float) -> ExtendedReal:
    """F_nu(k, a) = f_nu(k K(a) a) + K(a)^d f_nu(k b(a)).

    Increasing in k between poles.  At a = 0 both terms vanish identically
    (K = 0), for every k — including at poles of f_nu(k·1).
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if a == 0.0:
        return ExtendedReal(0.0)
    pt = two_ball_point(params, a)
    first = f_nu(params, k * pt.K * pt.a)
    if first.pole:
        return first
    second = f_nu(params, k * pt.b)
    if second.pole:
        return second
    return ExtendedReal(first.value + _powi(pt.K, params.d) * second.value)


def necessary_condition(params: DimensionParams, j: DirectedValue, k: DirectedValue) -> DirectedValue:
    """Enclosure of 2 (j_nu/k_nu)^d + j_nu/k_nu (must exceed 1 for k_nu < k_M).

    Increasing in the ratio j/k, so the lower endpoint uses (j.lo, k.hi).
    """
    d = params.d
    val = lambda t: 2.0 * _powi(t, d) + t
    lo = val(j.lo / k.hi)
    hi = val(j.hi / k.lo)
    pad = 1e-14 * hi
    return DirectedValue(lo - pad, hi + pad)


def t1_g1_g2(params: DimensionParams, point: TwoBallPoint, k_plus: float, k_minus: float) -> tuple[ExtendedReal, ExtendedReal, ExtendedReal]:
    """The three certificate building blocks at one constraint point:

        T1 = (aK)^d K'/K                       (k-independent),
        G1~ = (aK' + K) (k+ K)^(d-1) g_nu(k+ K a),
        G2~ = (k-)^(d-1) g_nu(k+ b),

    with the directed k-endpoints placed exactly where the certified
    inequalities need them: the k+ arguments push g_nu toward larger
    (less favorable) values while the k- prefactor shrinks the negative
    G2~ the least — both choices make the certificate conservative.
    Passing k_plus = k_minus = k_nu recovers the plain G1, G2.
    """
    a, b, K = point.a, point.b, point.K
    d = params.d
    if not 0.0 < a < 1.0:
        raise ValueError(f"t1_g1_g2 requires a in (0, 1), got a={a}")
    _, K_prime = derivatives(point)
    t1 = ExtendedReal(_powi(a * K, d) * K_prime / K)
    g_inner = g_nu(params, k_plus * K * a)
    if g_inner.pole:
        g1 = g_inner
    else:
        g1 = ExtendedReal((a * K_prime + K) * _powi(k_plus * K, d - 1) * g_inner.value)
    g_outer = g_nu(params, k_plus * b)
    if g_outer.pole:
        g2 = g_outer
    else:
        g2 = ExtendedReal(_powi(k_minus, d - 1) * g_outer.value)
    return t1, g1, g2


#: |F_nu(k,a)| above this invalidates the on-curve derivative decomposition
F_RESIDUAL_GUARD = 1e-6


def _delta(params: DimensionParams, r: float) -> float:
    """J_{nu+1}/J_nu - I_{nu+1}/I_nu, the ratio difference (= r^(d-1) g_nu)."""
    rj = ratio_j(params.nu, r)
    if rj.pole:
        raise ArithmeticError(f"ratio pole at r={r}")
    return rj.value - ratio_i(params.nu, r)


def dF_da_decomposition(params: DimensionParams, k: float, a: float) -> tuple[float, float, float, float]:
    """(2k^d T1, T2, T3, total): the split of d/da F_nu(k, a) valid on the
    curve F_nu(k, a) = 0, with

        T2 = d K' K^(d-1) f_nu(k b),
        T3 = k [(aK' + K) Delta(k K a) - b' Delta(k b)] f_nu(k K a),

    Delta being the Bessel-ratio difference.  Off-curve calls are rejected
    (|F_nu| > F_RESIDUAL_GUARD), since the simplification used the relation
    f_nu(kKa) = -K^d f_nu(kb).
    """
    F = F_nu(params, k, a)
    if F.pole or abs(F.value) > F_RESIDUAL_GUARD:
        raise ValueError(
            f"decomposition requires F_nu(k,a)=0; residual {F.value!r} at (k={k}, a={a})"
        )
    pt = two_ball_point(params, a)
    b, K = pt.b, pt.K
    d = params.d
    b_prime, K_prime = derivatives(pt)
    t1 = _powi(a * K, d) * K_prime / K
    t1_term = 2.0 * _powi(k, d) * t1
    f_outer = f_nu(params, k * b).expect_finite()
    t2_term = d * K_prime * _powi(K, d - 1) * f_outer
    f_inner = f_nu(params, k * K * a).expect_finite()
    t3_term = k * ((a * K_prime + K) * _delta(params, k * K * a) - b_prime * _delta(params, k * b)) * f_inner
    return t1_term, t2_term, t3_term, t1_term + t2_term + t3_term
