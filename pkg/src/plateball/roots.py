"""Conservative enclosures of the spectral constants.

Every root in this module (Bessel zeros j_{nu,m}, the constant k_nu, the
thresholds a_I / a_S, and the two-ball eigenvalue root k(a)) is located by
plain sign-change bisection and returned as a ``DirectedValue`` [lo, hi]
whose endpoints are pushed outward by a relative epsilon-inflation.  The
enclosures are conservative-but-not-formal: they assume the underlying
series evaluations are good to ~1e-12 relative, which dwarfs both the
bisection tolerance and the inflation.

Directed endpoints matter because each constant enters the certificate
inequalities monotonically in a known direction; downstream code picks
``.lo`` or ``.hi`` accordingly (k_nu by the right, a_S by the left, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .special_functions import (
    DimensionParams,
    _as_two_nu,
    _mcmahon,
    bessel_j,
    f_nu,
)

#: default absolute bisection tolerance
BISECT_TOL = 1e-12
#: default relative epsilon-inflation applied to every enclosure
INFLATE_REL = 1e-9
#: relative offset keeping brackets away from the poles flanking a root
_POLE_OFFSET = 1e-7


@dataclass(frozen=True)
class DirectedValue:
    """An interval [lo, hi] certified (non-formally) to contain a constant."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class SpectralConstants:
    """The per-dimension constants feeding every certificate.

    Invariants (checked at construction time by get_constants):
    j1.hi < k.lo < k.hi < j2.lo, and aI.hi < aS.lo.
    """

    params: DimensionParams
    j1: DirectedValue
    j2: DirectedValue
    k: DirectedValue
    aI: DirectedValue
    aS: DirectedValue


class BracketError(ArithmeticError):
    """A root bracket could not be established or verified."""


def _bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Shrink a sign-change bracket to width <= tol; returns the final bracket."""
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo, lo
    if fhi == 0.0:
        return hi, hi
    if (flo < 0) == (fhi < 0):
        raise BracketError(f"no sign change on [{lo}, {hi}] (f: {flo} .. {fhi})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution floor
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid, mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo, hi


def _inflate(lo: float, hi: float, rel: float) -> DirectedValue:
    pad = rel * max(abs(lo), abs(hi))
    return DirectedValue(lo - pad, hi + pad)


def bessel_zero(nu: float, m: int, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> DirectedValue:
    """Enclosure of j_{nu,m}, the m-th positive zero of J_nu.

    McMahon initial guess, bracket expansion to a sign change, bisection,
    epsilon-inflation, and a final sign-change re-verification at the
    inflated endpoints (a failed re-check raises rather than widens).
    """
    if m < 1:
        raise ValueError(f"zero index must be >= 1, got {m}")
    if nu < 0:
        raise ValueError(f"order must be nonnegative, got {nu}")
    two_nu = _as_two_nu(nu)
    if two_nu is not None:
        guess = _mcmahon(two_nu, m)
    else:
        guess = (m + nu / 2.0 - 0.25) * math.pi
    width = max(0.3, 0.02 * guess)
    f = lambda r: bessel_j(nu, r)
    lo, hi = guess - width, guess + width
    for _ in range(60):
        lo = max(lo, 1e-9)
        if f(lo) * f(hi) < 0:
            break
        width *= 1.4
        lo, hi = guess - width, guess + width
    else:
        raise BracketError(f"could not bracket zero {m} of J_{nu}")
    blo, bhi = _bisect(f, lo, hi, tol)
    enc = _inflate(blo, bhi, inflate)
    if not f(enc.lo) * f(enc.hi) < 0:
        raise BracketError(f"sign check failed at inflated endpoints for j_({nu},{m})")
    return enc


def k_nu(params: DimensionParams, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> DirectedValue:
    """Enclosure of k_nu, the unique zero of f_nu in (j_{nu,1}, j_{nu,2}).

    f_nu runs from -inf just past j_{nu,1} up to +inf just below j_{nu,2},
    so any interior sign-change bracket pins the root.
    """
    j1 = bessel_zero(params.nu, 1, tol=tol, inflate=inflate)
    j2 = bessel_zero(params.nu, 2, tol=tol, inflate=inflate)
    f = lambda r: f_nu(params, r).value
    lo = j1.hi * (1 + _POLE_OFFSET)
    hi = j2.lo * (1 - _POLE_OFFSET)
    blo, bhi = _bisect(f, lo, hi, tol)
    enc = _inflate(blo, bhi, inflate)
    if not (f(enc.lo) < 0 < f(enc.hi)):
        raise BracketError("f_nu sign check failed at inflated endpoints of k_nu")
    return enc


def a_I(params: DimensionParams, j: DirectedValue, k: DirectedValue) -> DirectedValue:
    """Enclosure of a_I from a_I^d = 1 - (j_nu/k_nu)^d.

    The map is decreasing in j and increasing in k, so the upper endpoint
    comes from (j.lo, k.hi) and the lower from (j.hi, k.lo); a thin extra
    pad absorbs the floating-point evaluation of the formula itself.
    """
    d = params.d

    def formula(jv: float, kv: float) -> float:
        inner = 1.0 - (jv / kv) ** d
        return 0.0 if inner <= 0.0 else inner ** (1.0 / d)

    lo = formula(j.hi, k.lo)
    hi = formula(j.lo, k.hi)
    pad = 1e-13 * max(hi, 1.0)
    return DirectedValue(max(lo - pad, 0.0), hi + pad)


def a_S(params: DimensionParams, j: DirectedValue, k: DirectedValue, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> DirectedValue:
    """Enclosure of a_S, the root of the increasing map a -> a K(a) - j_nu/k_nu.

    The root grows with the target ratio, so the lower endpoint is the root
    for j.lo/k.hi and the upper the root for j.hi/k.lo.
    """
    from .two_ball import K_of, two_ball_point

    def root_for(target: float) -> tuple[float, float]:
        fn = lambda a: a * K_of(two_ball_point(params, a)) - target
        return _bisect(fn, 0.0, 1.0, tol)

    lo, _ = root_for(j.lo / k.hi)
    _, hi = root_for(j.hi / k.lo)
    return _inflate(lo, hi, inflate)


def _pole_radii(params: DimensionParams, a: float, j1_mid: float, j2_mid: float) -> list[float]:
    from .two_ball import K_of, b_of_a, two_ball_point

    b = b_of_a(params, a)
    ka = K_of(two_ball_point(params, a)) * a
    poles = []
    for jz in (j1_mid, j2_mid):
        if ka > 0:
            poles.append(jz / ka)
        if b > 0:
            poles.append(jz / b)
    return sorted(poles)


def k_of_a(params: DimensionParams, a: float, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> DirectedValue:
    """Enclosure of k(a), the first positive zero of r -> F_nu(r, a).

    The root lies between the first two pole radii {j/(Ka), j/b} (F runs
    from -inf to +inf there); the bracket starts a relative 1e-7 inside.
    When the two pole arcs nearly collide (the M point) the open interval
    between them closes up and the enclosure spanning both poles is
    returned instead, which still contains the root by continuity.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if a == 0.0 or a == 1.0:
        return k_nu(params, tol=tol, inflate=inflate)
    from .two_ball import F_nu

    j1 = bessel_zero(params.nu, 1, tol=tol, inflate=inflate)
    j2 = bessel_zero(params.nu, 2, tol=tol, inflate=inflate)
    poles = _pole_radii(params, a, j1.mid, j2.mid)
    p, q = poles[0], poles[1]
    lo = p * (1 + _POLE_OFFSET)
    hi = q * (1 - _POLE_OFFSET)
    if lo >= hi:  # pole collision at/near the M point
        return _inflate(p, q, inflate)
    f = lambda r: F_nu(params, r, a).value
    flo, fhi = f(lo), f(hi)
    if not (flo < 0 < fhi):
        # bracket offsets crossed the root: the root is within the offset
        # bands next to a pole; fall back to the containing pole gap
        return _inflate(p, q, inflate)
    blo, bhi = _bisect(f, lo, hi, tol)
    return _inflate(blo, bhi, inflate)


def mu(params: DimensionParams, a: float, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> DirectedValue:
    """Enclosure of the two-ball eigenvalue mu(a, b(a)) = k(a)^4."""
    k = k_of_a(params, a, tol=tol, inflate=inflate)
    return _inflate(k.lo ** 4, k.hi ** 4, 1e-15)


def m_point(params: DimensionParams, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> tuple[DirectedValue, DirectedValue, DirectedValue]:
    """Enclosures of (b_M, a_M, k_M): the pole-collision point where Ka = b.

    b_M is the unique root in (0,1) of P(X) = 2X^d + X - 1; a_M^d = 1 - b_M^d;
    k_M = j_nu / b_M.
    """
    d = params.d
    P = lambda x: 2.0 * x ** d + x - 1.0
    blo, bhi = _bisect(P, 0.0, 1.0, tol)
    b_enc = _inflate(blo, bhi, inflate)

    from .two_ball import b_of_a

    # a_M decreases as b_M grows
    a_lo = b_of_a(params, min(b_enc.hi, 1.0))
    a_hi = b_of_a(params, max(b_enc.lo, 0.0))
    a_enc = _inflate(a_lo, a_hi, 1e-13)

    j1 = bessel_zero(params.nu, 1, tol=tol, inflate=inflate)
    k_enc = _inflate(j1.lo / b_enc.hi, j1.hi / b_enc.lo, 1e-15)
    return b_enc, a_enc, k_enc


@lru_cache(maxsize=128)
def _constants_cached(d: int, tol: float, inflate: float) -> SpectralConstants:
    params = DimensionParams(d)
    j1 = bessel_zero(params.nu, 1, tol=tol, inflate=inflate)
    j2 = bessel_zero(params.nu, 2, tol=tol, inflate=inflate)
    k = k_nu(params, tol=tol, inflate=inflate)
    ai = a_I(params, j1, k)
    as_ = a_S(params, j1, k, tol=tol, inflate=inflate)
    if not (j1.hi < k.lo and k.hi < j2.lo):
        raise BracketError(f"enclosure ordering j1 < k < j2 violated for d={d}")
    if not ai.hi < as_.lo:
        raise BracketError(f"enclosure ordering a_I < a_S violated for d={d}")
    return SpectralConstants(params=params, j1=j1, j2=j2, k=k, aI=ai, aS=as_)


def get_constants(params: DimensionParams, *, tol: float = BISECT_TOL, inflate: float = INFLATE_REL) -> SpectralConstants:
    """All spectral constants for one dimension, cached per (d, tolerances)."""
    return _constants_cached(params.d, tol, inflate)
