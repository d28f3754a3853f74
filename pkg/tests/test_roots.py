"""Directed enclosures: containment against the mpmath oracle, nesting,
and the derived placement constants."""

import pytest

import oracles
from plateball.roots import (
    DirectedValue,
    a_I,
    a_S,
    bessel_zero,
    get_constants,
    k_nu,
    k_of_a,
    m_point,
    mu,
)
from plateball.special_functions import DimensionParams


def test_directed_value_invariants():
    dv = DirectedValue(1.0, 2.0)
    assert dv.mid == 1.5 and dv.width == 1.0
    assert 1.5 in dv and 2.5 not in dv
    with pytest.raises(ValueError):
        DirectedValue(2.0, 1.0)


@pytest.mark.parametrize("d", range(4, 10))
def test_bessel_zero_contains_oracle(d):
    nu = d / 2 - 1
    for m, ref in zip((1, 2), oracles.J_ZEROS[d]):
        enc = bessel_zero(nu, m)
        assert enc.lo <= ref <= enc.hi
        assert enc.width < 1e-7


def test_bessel_zero_enclosures_nest():
    loose = bessel_zero(1.0, 1, tol=1e-6)
    tight = bessel_zero(1.0, 1, tol=1e-13)
    assert loose.lo <= tight.lo and tight.hi <= loose.hi


def test_bessel_zero_deeper_zeros():
    # j_{1,5} = 16.47063005087763... (Abramowitz & Stegun table)
    enc = bessel_zero(1.0, 5)
    assert enc.lo <= 16.47063005087763 <= enc.hi


@pytest.mark.parametrize("d", range(4, 10))
def test_k_enclosure_contains_oracle_and_orders(d):
    params = DimensionParams(d)
    k = k_nu(params)
    assert k.lo <= oracles.K_NU[d] <= k.hi
    j1, j2 = oracles.J_ZEROS[d]
    assert j1 < k.lo and k.hi < j2


@pytest.mark.parametrize("d", range(4, 10))
def test_constants_bundle_orderings(d):
    c = get_constants(DimensionParams(d))
    assert c.j1.hi < c.k.lo < c.k.hi < c.j2.lo
    assert 0.0 < c.aI.hi < c.aS.lo < 1.0


def test_placements_bracket_true_roots():
    """a_I and a_S from directed constants must straddle the values obtained
    from the oracle's 22-digit j and k."""
    d = 4
    params = DimensionParams(d)
    c = get_constants(params)
    j, k = oracles.J_ZEROS[d][0], oracles.K_NU[d]
    true_aI = (1.0 - (j / k) ** d) ** (1.0 / d)
    aI = a_I(params, c.j1, c.k)
    assert aI.lo <= true_aI <= aI.hi
    aS = a_S(params, c.j1, c.k)
    assert aS.lo < 1.0 and aS.hi <= 1.0
    assert aS.lo <= aS.hi


def test_m_point_matches_polynomial_oracle():
    b_ref, a_ref, k_ref = oracles.M_POINT_D4
    b, a, k = m_point(DimensionParams(4))
    assert b.lo <= b_ref <= b.hi
    assert a.lo <= a_ref <= a.hi
    assert k.lo <= k_ref <= k.hi


def test_k_of_a_endpoints_agree_with_k_nu():
    params = DimensionParams(4)
    k = k_nu(params)
    for a in (0.0, 1.0):
        enc = k_of_a(params, a)
        assert enc.lo == k.lo and enc.hi == k.hi


def test_k_of_a_collision_contains_matching_value():
    params = DimensionParams(4)
    b_ref, a_ref, k_ref = oracles.M_POINT_D4
    enc = k_of_a(params, a_ref)
    assert enc.lo <= k_ref <= enc.hi


def test_k_of_a_interior_between_pole_radii():
    params = DimensionParams(4)
    enc = k_of_a(params, 0.5)
    assert enc.width < 1e-6
    # above the symmetric value and below the second branch
    assert enc.lo > oracles.K_NU[4]


def test_mu_is_fourth_power_of_k():
    params = DimensionParams(4)
    enc = k_of_a(params, 0.3)
    m = mu(params, 0.3)
    assert m.lo <= enc.lo**4 <= enc.hi**4 <= m.hi


def test_mu_endpoint_equality():
    params = DimensionParams(5)
    m0, m1 = mu(params, 0.0), mu(params, 1.0)
    assert m0.lo == m1.lo and m0.hi == m1.hi
    assert m0.lo <= oracles.K_NU[5] ** 4 <= m0.hi


def test_mu_small_grid_above_endpoint():
    params = DimensionParams(4)
    endpoint = mu(params, 0.0)
    for i in range(11):
        a = i / 10
        assert mu(params, a).lo >= endpoint.hi * (1 - 1e-6)
