"""Independent reference values and routes for the test suite.

Everything in this module is computed *without* the package under test:
zeros and special functions come from mpmath (dps >= 40), closed forms are
evaluated symbolically-ish in mpmath and frozen here at 22 significant
digits.  Regenerate by running this file as a script; the printed block
should match the literals below.

The frozen values let the tests assert against a second, slower route
without paying the mpmath cost on every run.
"""

from __future__ import annotations

import math
from functools import lru_cache

# first and second positive zeros of J_nu, nu = d/2 - 1 (mpmath besseljzero)
J_ZEROS = {
    4: (3.831705970207512315614, 7.015586669815618753537),
    5: (4.493409457909064175308, 7.725251836937707164195),
    6: (5.135622301840682556301, 8.417244140399864857784),
    7: (5.763459196894549791406, 9.095011330476355156338),
    8: (6.380161895923983506237, 9.761023129981669678545),
    9: (6.987932000500519959015, 10.41711854737936476325),
}

# first root of J_{nu+1} I_nu + I_{nu+1} J_nu after j_{nu,1}
# (equivalently of J_{nu+1}/J_nu + I_{nu+1}/I_nu), mpmath bisection at dps=40
K_NU = {
    4: 4.610899879049055827242,
    5: 5.267657530336814570553,
    6: 5.90567823542052287968,
    7: 6.529929581924475633518,
    8: 7.1435310235048408655,
    9: 7.748589599213664803776,
}

# (J_nu(r), I_nu(r)) at selected (2*nu, r), mpmath dps=40
BESSEL_JI = {
    (2, 0.7): (0.3289957415400589478488, 0.3718796777770086547428),
    (2, 11.5): (-0.2283786206653234746143, 11223.20973851056829719),
    (3, 4.25): (0.0911464484606791644694, 10.37777618482630857015),
    (5, 29.0): (0.1094412005075960049555, 262150642085.2107368804),
    (7, 2.0): (0.06851754998512706960469, 0.1069054882846333671763),
    (4, 36.0): (0.1009935033638853439109, 271908841477280.5016968),
}

# d=4 geometry at a = 0.83: b = (1 - a^4)^(1/4) and the asymmetry factor K
TWO_BALL_D4_A083 = (0.8513849849943025980186, 0.3535809404494352808079)

# d=4 matching point: root of 2X^4 + X - 1, its partner radius, and j_{1,1}/b
M_POINT_D4 = (0.6477988712610423854905, 0.952727171491317371875, 5.914962406075969247939)

# Poisson profile v(r) on the unit ball of R^4 for the two-step source
# f* = 2 on [0, |omega|/3), 1/2 on the rest; values from the analytic
# piecewise antiderivative (mpmath quadrature at dps=40)
TWO_STEP_V_D4 = {
    0.0: 0.2165063509461096616909,
    0.25: 0.2008813509461096616909,
    0.5: 0.1540063509461096616909,
    0.75: 0.07588135094610966169093,
}


def sigma4(d: int) -> float:
    """Rayleigh-type sum over Bessel zeros: sum 1/j_{nu,m}^4 = 1/(16(nu+1)^2(nu+2))."""
    nu = d / 2 - 1
    return 1.0 / (16.0 * (nu + 1) ** 2 * (nu + 2))


@lru_cache(maxsize=32)
def _mp_zeros(d: int, n: int) -> tuple[float, ...]:
    import mpmath as mp

    with mp.workdps(25):
        nu = mp.mpf(d) / 2 - 1
        return tuple(float(mp.besseljzero(nu, m)) for m in range(1, n + 1))


def f_series(d: int, r: float, n_zeros: int = 400) -> float:
    """f_nu(r) by the zero expansion, independently of the ratio route.

    From J_{nu+1}/J_nu = sum 2r/(j_m^2 - r^2) and the I twin with + signs,

        f_nu(r) = 4 r^d sum_m j_m^2 / (j_m^4 - r^4)
                = 2 r^d / d  +  4 r^(d+4) sum_m 1 / (j_m^2 (j_m^4 - r^4)),

    where the pulled-out constant is the exact sum 2/(2d).  The accelerated
    tail decays like m^-6, so n_zeros=400 leaves ~1e-12 absolute.
    """
    zeros = _mp_zeros(d, n_zeros)
    acc = math.fsum(1.0 / (j * j * (j**4 - r**4)) for j in zeros)
    return 2.0 * r**d / d + 4.0 * r ** (d + 4) * acc


def mp_ratio_j(two_nu: int, r: float) -> float:
    """J_{nu+1}/J_nu via mpmath at dps=40 (reference for near-zero behavior)."""
    import mpmath as mp

    with mp.workdps(40):
        nu = mp.mpf(two_nu) / 2
        return float(mp.besselj(nu + 1, r) / mp.besselj(nu, r))


if __name__ == "__main__":
    import mpmath as mp

    mp.mp.dps = 40
    print("J_ZEROS / K_NU:")
    for d in range(4, 10):
        nu = mp.mpf(d) / 2 - 1
        j1, j2 = mp.besseljzero(nu, 1), mp.besseljzero(nu, 2)
        h = lambda r: mp.besselj(nu + 1, r) * mp.besseli(nu, r) + mp.besseli(
            nu + 1, r
        ) * mp.besselj(nu, r)
        k = mp.findroot(
            h,
            (j1 * (1 + mp.mpf("1e-9")), j2 * (1 - mp.mpf("1e-9"))),
            solver="bisect",
            tol=mp.mpf("1e-35"),
        )
        print(f"  {d}: ({mp.nstr(j1, 22)}, {mp.nstr(j2, 22)})  k={mp.nstr(k, 22)}")
    a = mp.mpf("0.83")
    b = (1 - a**4) ** mp.mpf("0.25")
    K = a**3 / ((a**4 + b**4) ** mp.mpf("0.75") + b**3)
    print("TWO_BALL_D4_A083:", mp.nstr(b, 22), mp.nstr(K, 22))
    bM = mp.findroot(lambda x: 2 * x**4 + x - 1, mp.mpf("0.65"))
    print(
        "M_POINT_D4:",
        mp.nstr(bM, 22),
        mp.nstr((1 - bM**4) ** mp.mpf("0.25"), 22),
        mp.nstr(mp.besseljzero(mp.mpf(1), 1) / bM, 22),
    )
