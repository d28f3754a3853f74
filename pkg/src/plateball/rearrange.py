"""Signed rearrangements on histograms, radial Poisson solving, and the
improved annulus comparison check.

Measurable functions enter as measure-value histograms (``StepFunction``),
for which every rearrangement is *exact*: all histogram arithmetic runs in
``fractions.Fraction`` (binary floats convert losslessly), so the moment
and coincidence identities below are integer identities with residual
exactly zero — any nonzero residual is a logic bug, not roundoff.

The continuous half of the module solves -Δv = f* on the ball ω* by
one-dimensional quadrature in the measure variable, and -Δu = f on an
annulus in closed form, then checks the improved comparison inequality
kappa^2 v >= u* with kappa the isoperimetric deficit factor of a domain
with a hole.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .special_functions import DimensionParams

_FractionLike = int | float | Fraction


def _frac(x: _FractionLike) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(float(x))  # binary floats are exact rationals


@dataclass(frozen=True)
class StepFunction:
    """A function known only through its histogram: (measure, value) cells.

    Cell order never affects any rearrangement output (permutation
    invariance); measures must be positive.
    """

    cells: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        for m, _ in self.cells:
            if m <= 0:
                raise ValueError(f"cell measures must be positive, got {m}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[_FractionLike, _FractionLike]]) -> "StepFunction":
        return cls(tuple((_frac(m), _frac(v)) for m, v in pairs))

    @property
    def total_measure(self) -> Fraction:
        return sum((m for m, _ in self.cells), Fraction(0))

    def breakpoints(self) -> list[Fraction]:
        """Cumulative measures 0 = c_0 < c_1 < ... < c_n = |omega|."""
        acc = Fraction(0)
        out = [acc]
        for m, _ in self.cells:
            acc += m
            out.append(acc)
        return out

    def value_at(self, s: Fraction) -> Fraction:
        """Value on the half-open piece containing s (cells in stored order)."""
        if not 0 <= s < self.total_measure:
            raise ValueError(f"s={s} outside [0, {self.total_measure})")
        acc = Fraction(0)
        for m, v in self.cells:
            acc += m
            if s < acc:
                return v
        return self.cells[-1][1]  # unreachable given the range check

    def moment(self, p: int) -> Fraction:
        return sum((m * v**p for m, v in self.cells), Fraction(0))


def distribution(f: StepFunction, t: _FractionLike) -> Fraction:
    """Distribution function: the exact measure of {f > t}."""
    tt = _frac(t)
    return sum((m for m, v in f.cells if v > tt), Fraction(0))


def decreasing_rearrangement(f: StepFunction) -> StepFunction:
    """f*: the same histogram with cells sorted by value, largest first
    (equal values coalesced).  No arithmetic — rearrangement is exact."""
    ordered = sorted(f.cells, key=lambda cell: cell[1], reverse=True)
    merged: list[tuple[Fraction, Fraction]] = []
    for m, v in ordered:
        if merged and merged[-1][1] == v:
            merged[-1] = (merged[-1][0] + m, v)
        else:
            merged.append((m, v))
    return StepFunction(tuple(merged))


def _positive_part(f: StepFunction) -> StepFunction:
    return StepFunction(tuple((m, v if v > 0 else Fraction(0)) for m, v in f.cells))


def _negated(f: StepFunction) -> StepFunction:
    return StepFunction(tuple((m, -v) for m, v in f.cells))


def talenti_dagger(f: StepFunction) -> StepFunction:
    """The signed rearrangement f†(s) = f+*(s) - f-*(|omega| - s).

    Built literally from the two one-signed rearrangements on the merged
    breakpoint grid; on every piece at least one operand vanishes (the
    supports {s < |{f>0}|} and {s > |omega| - |{f<0}|} are disjoint).
    """
    total = f.total_measure
    plus = decreasing_rearrangement(_positive_part(f))
    minus = decreasing_rearrangement(_positive_part(_negated(f)))
    cuts = set(plus.breakpoints())
    cuts.update(total - c for c in minus.breakpoints())
    grid = sorted(c for c in cuts if 0 <= c <= total)
    cells = []
    for left, right in zip(grid[:-1], grid[1:]):
        if right == left:
            continue
        mid = (left + right) / 2
        val = plus.value_at(mid) - minus.value_at(total - mid)
        cells.append((right - left, val))
    return StepFunction(tuple(cells))


def check_dagger_equals_star(f: StepFunction) -> Fraction:
    """sup |f*(s) - f†(s)| away from cell boundaries; exactly 0 on histograms."""
    star = decreasing_rearrangement(f)
    dagger = talenti_dagger(f)
    grid = sorted(set(star.breakpoints()) | set(dagger.breakpoints()))
    worst = Fraction(0)
    for left, right in zip(grid[:-1], grid[1:]):
        if right == left:
            continue
        mid = (left + right) / 2
        diff = abs(star.value_at(mid) - dagger.value_at(mid))
        worst = max(worst, diff)
    return worst


def _integral_prefix(g: StepFunction, upto: Fraction, p: int) -> Fraction:
    """Exact ∫_0^upto g(s)^p ds for a step function g."""
    if not 0 <= upto <= g.total_measure:
        raise ValueError(f"prefix bound {upto} outside [0, {g.total_measure}]")
    remaining = upto
    acc = Fraction(0)
    for m, v in g.cells:
        take = min(m, remaining)
        if take <= 0:
            break
        acc += take * v**p
        remaining -= take
    return acc


def split_moment_identity(f: StepFunction, split: _FractionLike, p: int) -> Fraction:
    """Residual of the split-moment identity

        ∫_0^{split} (f†)^p + (-1)^p ∫_0^{|omega|-split} ((-f)†)^p  -  ∫ f^p,

    which vanishes for every split in [0, |omega|] and every integer p >= 0.
    (The canonical split is |{f > 0}|, matching the sign decomposition the
    identity is used with.)  Exact rational arithmetic: the return is a
    Fraction and the expected value is literally zero.
    """
    if p < 0:
        raise ValueError(f"p must be a nonnegative integer, got {p}")
    total = f.total_measure
    sp = _frac(split)
    if not 0 <= sp <= total:
        raise ValueError(f"split {sp} outside [0, {total}]")
    dagger = talenti_dagger(f)
    dagger_neg = talenti_dagger(_negated(f))
    lhs = _integral_prefix(dagger, sp, p) + (-1) ** p * _integral_prefix(
        dagger_neg, total - sp, p
    )
    return lhs - f.moment(p)


def sign_split(f: StepFunction) -> Fraction:
    """|{f > 0}|: the split used when the identity mirrors a sign decomposition."""
    return distribution(f, 0)


def hardy_littlewood_restriction(
    f: StepFunction, subset_measures: Sequence[_FractionLike]
) -> tuple[list[Fraction], list[Fraction]]:
    """Pointwise comparison (f|_A)* vs f*|_{A*} for a sub-histogram A.

    ``subset_measures[i]`` is how much of cell i belongs to A (between 0 and
    the cell's measure).  Since A* is the ball of measure |A|, the right
    side is simply f* on [0, |A|).  Returns the two value lists sampled on
    the merged piece decomposition of [0, |A|); the first never exceeds the
    second (Hardy-Littlewood).
    """
    if len(subset_measures) != len(f.cells):
        raise ValueError("subset_measures must give one entry per cell")
    taken = []
    for (m, v), sub in zip(f.cells, subset_measures):
        s = _frac(sub)
        if not 0 <= s <= m:
            raise ValueError(f"subset measure {s} outside [0, {m}]")
        if s > 0:
            taken.append((s, v))
    if not taken:
        return [], []
    restricted = decreasing_rearrangement(StepFunction(tuple(taken)))
    star = decreasing_rearrangement(f)
    measure_a = restricted.total_measure
    grid = sorted(
        {c for c in star.breakpoints() if c < measure_a}
        | set(restricted.breakpoints()[:-1])
        | {measure_a}
    )
    lhs, rhs = [], []
    for left, right in zip(grid[:-1], grid[1:]):
        mid = (left + right) / 2
        lhs.append(restricted.value_at(mid))
        rhs.append(star.value_at(mid))
    return lhs, rhs


def random_step_function(rng: random.Random, max_cells: int = 8) -> StepFunction:
    """A random signed histogram with exact rational cells (for lemma corpora)."""
    n = rng.randint(1, max_cells)
    cells = tuple(
        (
            Fraction(rng.randint(1, 20), rng.randint(1, 9)),
            Fraction(rng.randint(-30, 30), rng.randint(1, 7)),
        )
        for _ in range(n)
    )
    return StepFunction(cells)


@dataclass(frozen=True)
class LemmaCorpusReport:
    """Outcome of the randomized exact-identity suite on seeded histograms."""

    seed: int
    count: int
    p_values: tuple[int, ...]
    split_failures: int  # split-moment identity residual != 0
    coincidence_failures: int  # dagger-vs-star discrepancy != 0
    restriction_failures: int  # restricted rearrangement exceeded f* somewhere
    worst_discrepancy: float

    @property
    def passed(self) -> bool:
        return (
            self.split_failures == 0
            and self.coincidence_failures == 0
            and self.restriction_failures == 0
        )


def run_lemma_corpus(
    seed: int = 0, count: int = 1000, p_values: Sequence[int] = (1, 2, 3)
) -> LemmaCorpusReport:
    """Run the three exact rearrangement identities on `count` seeded random
    histograms: the split-moment identity (at the sign split and at a random
    split), the dagger/star coincidence, and the Hardy-Littlewood restriction
    bound with a random sub-histogram.  All residuals are exact Fractions,
    so every failure counter should be zero."""
    rng = random.Random(seed)
    split_failures = coincidence_failures = restriction_failures = 0
    worst = Fraction(0)
    for _ in range(count):
        f = random_step_function(rng)
        disc = check_dagger_equals_star(f)
        worst = max(worst, disc)
        if disc != 0:
            coincidence_failures += 1
        arbitrary = f.total_measure * Fraction(rng.randint(0, 100), 100)
        for p in p_values:
            if split_moment_identity(f, sign_split(f), p) != 0:
                split_failures += 1
            if split_moment_identity(f, arbitrary, p) != 0:
                split_failures += 1
        subset = [m * Fraction(rng.randint(0, 4), 4) for m, _ in f.cells]
        lhs, rhs = hardy_littlewood_restriction(f, subset)
        if any(l > r for l, r in zip(lhs, rhs)):
            restriction_failures += 1
    return LemmaCorpusReport(
        seed=seed,
        count=count,
        p_values=tuple(p_values),
        split_failures=split_failures,
        coincidence_failures=coincidence_failures,
        restriction_failures=restriction_failures,
        worst_discrepancy=float(worst),
    )


# ---------------------------------------------------------------------------
# Radial profiles and solvers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BallDomain:
    radius: float


@dataclass(frozen=True)
class AnnulusDomain:
    r_in: float
    r_out: float


@dataclass(frozen=True)
class RadialProfile:
    """Samples of a radial function on a strictly increasing radius grid."""

    domain: BallDomain | AnnulusDomain
    d: int
    grid: tuple[float, ...]
    samples: tuple[float, ...]
    quad_error: float | None = None

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.samples):
            raise ValueError("grid and samples must have equal length")
        if any(b <= a for a, b in zip(self.grid[:-1], self.grid[1:])):
            raise ValueError("radius grid must be strictly increasing")
        if isinstance(self.domain, AnnulusDomain) and self.domain.r_in <= 0:
            raise ValueError("annulus inner radius must be positive")


@dataclass(frozen=True)
class HoleGeometry:
    """|omega|, the hole measure |T|, and the resulting deficit factor kappa."""

    omega_measure: float
    hole_measure: float
    kappa: float

    @classmethod
    def from_measures(cls, params: DimensionParams, omega_measure: float, hole_measure: float) -> "HoleGeometry":
        if omega_measure <= 0 or hole_measure < 0:
            raise ValueError("need |omega| > 0 and |T| >= 0")
        e = (params.d - 1) / params.d
        kappa = omega_measure**e / ((omega_measure + hole_measure) ** e + hole_measure**e)
        return cls(omega_measure=omega_measure, hole_measure=hole_measure, kappa=kappa)


def _simpson(vals: np.ndarray, h: float) -> float:
    """Composite Simpson on an even number of uniform panels."""
    n = len(vals) - 1
    return (h / 3.0) * float(
        vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-2:2].sum()
    )


def _check_nonincreasing(fstar: StepFunction) -> None:
    vals = [v for _, v in fstar.cells]
    if any(b > a for a, b in zip(vals[:-1], vals[1:])):
        raise ValueError("radial_poisson requires a nonincreasing f*")


def radial_poisson(
    fstar: StepFunction,
    params: DimensionParams,
    omega_measure: float,
    *,
    panels: int = 4096,
    grid_points: int = 257,
) -> RadialProfile:
    """Solve -Δv = f* on the ball ω* of measure omega_measure, v = 0 on the
    boundary, for a nonincreasing step function f*.

    In the measure variable the solution is the single integral

        v(x) = ∫_{s(x)}^{|ω|} G(ρ) / (C_d² ρ^(2(d-1)/d)) dρ,
        G(ρ) = ∫_0^ρ f*,   s(x) = |B_|x||,

    integrated after the substitution w = ρ^(2/d), which removes the
    endpoint singularity (the integrand extends continuously to w = 0) and
    renders constant f* exactly: the integrand is then itself constant, so
    the classical torsion profile (R² - r²)/(2d) comes out to quadrature
    exactness.  Composite Simpson per histogram segment with a Richardson
    half-resolution error estimate.
    """
    _check_nonincreasing(fstar)
    total = float(fstar.total_measure)
    if not math.isclose(total, omega_measure, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"f* lives on measure {total}, expected |omega| = {omega_measure}")
    d = params.d
    c2 = params.c_d**2
    radius = (omega_measure / params.omega_d) ** (1.0 / d)

    # cumulative G at histogram breakpoints: G is piecewise linear in rho
    cuts = [float(c) for c in fstar.breakpoints()]
    vals = [float(v) for _, v in fstar.cells]
    g_at = [0.0]
    for (a, b), v in zip(zip(cuts[:-1], cuts[1:]), vals):
        g_at.append(g_at[-1] + v * (b - a))

    def G(rho: float) -> float:
        if rho <= 0.0:
            return 0.0
        if rho >= cuts[-1]:
            return g_at[-1]
        i = bisect_right(cuts, rho) - 1
        return g_at[i] + vals[i] * (rho - cuts[i])

    def integrand(w: np.ndarray) -> np.ndarray:
        rho = w ** (d / 2.0)
        gv = np.array([G(r) for r in rho])
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (d / (2.0 * c2)) * gv * np.where(w > 0, w ** (-d / 2.0), 0.0)
        # continuous extension at w = 0: G(rho) ~ f*(0) * rho
        out[w == 0.0] = (d / (2.0 * c2)) * (vals[0] if vals else 0.0)
        return out

    radii = np.linspace(0.0, radius, grid_points)
    s_req = params.omega_d * radii**d
    w_req = s_req ** (2.0 / d)
    w_cuts = [c ** (2.0 / d) for c in cuts]
    nodes = np.unique(np.concatenate([w_req, np.array(w_cuts)]))

    def cumulative(n_total: int) -> np.ndarray:
        """Integral of the integrand over each inter-node gap (Simpson)."""
        gaps = np.diff(nodes)
        weights = np.maximum(gaps, 1e-30)
        alloc = np.maximum(2, (2 * np.round(weights / weights.sum() * n_total / 2)).astype(int))
        out = np.empty(len(gaps))
        for i, (a, b) in enumerate(zip(nodes[:-1], nodes[1:])):
            k = alloc[i]
            xs = np.linspace(a, b, k + 1)
            out[i] = _simpson(integrand(xs), (b - a) / k)
        return out

    fine = cumulative(panels)
    coarse = cumulative(max(len(nodes) * 2, panels // 2))
    err = abs(float(fine.sum() - coarse.sum())) / 15.0

    # v at a required w = integral from that w to the top
    suffix = np.concatenate([np.cumsum(fine[::-1])[::-1], [0.0]])
    idx = np.searchsorted(nodes, w_req)
    samples = suffix[idx]
    return RadialProfile(
        domain=BallDomain(radius=radius),
        d=d,
        grid=tuple(radii.tolist()),
        samples=tuple(samples.tolist()),
        quad_error=err,
    )


class _AnnulusClosedForm:
    """u(r) = -f r²/(2d) + c1 + c2 φ(r) on [r_in, r_out], u = 0 at both ends,
    with φ the radial harmonic: r^(2-d) for d >= 3, log r for d = 2."""

    def __init__(self, params: DimensionParams, r_in: float, r_out: float, f: float):
        if not 0.0 < r_in < r_out:
            raise ValueError(f"need 0 < r_in < r_out, got ({r_in}, {r_out})")
        if f <= 0:
            raise ValueError(f"source must be positive, got {f}")
        d = params.d
        self.params = params
        self.r_in, self.r_out, self.f = r_in, r_out, f
        if d == 2:
            self.phi = np.log
            self.dphi = lambda r: 1.0 / r
        else:
            self.phi = lambda r: r ** (2 - d)
            self.dphi = lambda r: (2 - d) * r ** (1 - d)
        quad = lambda r: f * r * r / (2.0 * d)
        self.c2 = (quad(r_in) - quad(r_out)) / (self.phi(r_in) - self.phi(r_out))
        self.c1 = quad(r_in) - self.c2 * self.phi(r_in)
        # the unique interior critical point (u' has one sign change)
        lo, hi = r_in, r_out
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.du(mid) > 0:
                lo = mid
            else:
                hi = mid
        self.r_peak = 0.5 * (lo + hi)
        self.u_max = self.u(self.r_peak)

    def u(self, r: float) -> float:
        return -self.f * r * r / (2.0 * self.params.d) + self.c1 + self.c2 * self.phi(r)

    def du(self, r: float) -> float:
        return -self.f * r / self.params.d + self.c2 * self.dphi(r)


def annulus_solution(
    params: DimensionParams, r_in: float, r_out: float, f: float, *, grid_points: int = 513
) -> RadialProfile:
    """Closed-form torsion-type solution of -Δu = f (constant) on the annulus
    with u = 0 on both boundary spheres: positive inside with a single
    interior maximum, so its sublevel geometry is a radial shell."""
    cf = _AnnulusClosedForm(params, r_in, r_out, f)
    radii = np.linspace(r_in, r_out, grid_points)
    return RadialProfile(
        domain=AnnulusDomain(r_in=r_in, r_out=r_out),
        d=params.d,
        grid=tuple(radii.tolist()),
        samples=tuple(float(cf.u(float(r))) for r in radii),
        quad_error=None,
    )


def _ustar_on_measures(cf: _AnnulusClosedForm, s_grid: np.ndarray) -> np.ndarray:
    """u*(s) for the unimodal annulus profile, via level-set measures.

    |{u > t}| = omega_d (r2(t)^d - r1(t)^d) with r1, r2 the two radial roots
    of u = t flanking the peak; u*(s) inverts that decreasing map by
    bisection (vectorized across the whole s grid)."""
    params = cf.params
    d, om = params.d, params.omega_d

    def measure_above(t: np.ndarray) -> np.ndarray:
        lo1 = np.full_like(t, cf.r_in)
        hi1 = np.full_like(t, cf.r_peak)
        lo2 = np.full_like(t, cf.r_peak)
        hi2 = np.full_like(t, cf.r_out)
        for _ in range(80):
            m1 = 0.5 * (lo1 + hi1)
            up = cf.u(m1) < t  # left branch: u increasing
            lo1 = np.where(up, m1, lo1)
            hi1 = np.where(up, hi1, m1)
            m2 = 0.5 * (lo2 + hi2)
            dn = cf.u(m2) < t  # right branch: u decreasing
            hi2 = np.where(dn, m2, hi2)
            lo2 = np.where(dn, lo2, m2)
        r1 = 0.5 * (lo1 + hi1)
        r2 = 0.5 * (lo2 + hi2)
        return om * (r2**d - r1**d)

    t_lo = np.zeros_like(s_grid)
    t_hi = np.full_like(s_grid, cf.u_max)
    for _ in range(60):
        mid = 0.5 * (t_lo + t_hi)
        too_small = measure_above(mid) > s_grid
        t_lo = np.where(too_small, mid, t_lo)
        t_hi = np.where(too_small, t_hi, mid)
    return 0.5 * (t_lo + t_hi)


def verify_comparison(
    params: DimensionParams,
    r_in: float,
    r_out: float,
    quadrature_n: int = 4096,
    *,
    grid_points: int = 129,
) -> tuple[float, float]:
    """Check kappa² v >= u* for the annulus with unit source.

    u solves -Δu = 1 on the annulus (closed form); u* comes from exact
    level-set measures of the unimodal profile; v solves -Δv = 1 on the
    ball ω* of the same measure; kappa is the hole-geometry deficit.
    Returns (max over the grid of u* - kappa² v, kappa): a nonpositive
    first component means the inequality held everywhere sampled.
    """
    cf = _AnnulusClosedForm(params, r_in, r_out, 1.0)
    om = params.omega_d
    omega_measure = om * (r_out**params.d - r_in**params.d)
    hole_measure = om * r_in**params.d
    geom = HoleGeometry.from_measures(params, omega_measure, hole_measure)

    fstar = StepFunction.from_pairs([(omega_measure, 1.0)])
    v = radial_poisson(
        fstar, params, omega_measure, panels=quadrature_n, grid_points=grid_points
    )
    radii = np.asarray(v.grid)
    s_grid = om * radii**params.d
    # clamp inside [0, |omega|): u*(|omega|) is a boundary value, not sampled
    s_grid = np.minimum(s_grid, omega_measure * (1 - 1e-15))
    ustar = _ustar_on_measures(cf, s_grid)
    gap = ustar - geom.kappa**2 * np.asarray(v.samples)
    return float(gap.max()), geom.kappa
