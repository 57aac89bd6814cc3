import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bethekit import (InvalidInputError, ModelSpec, PoleError, RootSet, Sector, bethe_residual,
                      canonicalize, drinfeld_polynomial, normalized_residual, q_number,
                      rational_form_residual)
from bethekit.model import bethe_jacobian, close, drinfeld_roots, eval_drinfeld

from _instances import random_xxx, random_xxz

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def single_site(twist=-1):
    return ModelSpec.xxx((1,), (0,), mu=cmath.log(twist))


# -- specs and sectors -------------------------------------------------------

def test_spin_list_must_be_positive():
    with pytest.raises(InvalidInputError):
        ModelSpec.xxx((1, 0), (0, 1))
    with pytest.raises(InvalidInputError):
        ModelSpec.xxx((), ())


def test_xxz_rejects_q_squared_one_and_zero_sites():
    with pytest.raises(InvalidInputError):
        ModelSpec.xxz((1,), (1,), gamma=math.pi)
    with pytest.raises(InvalidInputError):
        ModelSpec.xxz((1, 1), (1, 0), gamma=0.5)


def test_twist_is_derived_from_exponent():
    spec = ModelSpec.xxz((1,), (1,), gamma=0.4, mu=0.7)
    assert close(spec.twist, cmath.exp(2j * 0.4 * 0.7))
    assert close(single_site(-1).twist, -1)


def test_sector_magnetization_is_exact():
    spec = ModelSpec.xxx((1, 2, 3), (0, 1, 2))
    sec = Sector.of(spec, 2)
    assert sec.two_sz == 2 and sec.s_z == 1.0
    with pytest.raises(InvalidInputError):
        Sector(2, 3).check(spec)


# -- residuals ----------------------------------------------------------------

def test_single_site_residual_vanishes_at_closed_form_root():
    spec = single_site(-1)
    np.testing.assert_allclose(bethe_residual(spec, Sector.of(spec, 1), [0]), [0], atol=1e-15)


def test_empty_system_residual():
    spec = ModelSpec.xxx((1, 1), (0, 1))
    assert bethe_residual(spec, Sector.of(spec, 0), []).shape == (0,)


def test_periodic_pair_midpoint_solves():
    spec = ModelSpec.xxx((1, 1), (0, 1))
    np.testing.assert_allclose(bethe_residual(spec, Sector.of(spec, 1), [0.5]), [0], atol=1e-15)


def test_residual_length_mismatch():
    spec = ModelSpec.xxx((1, 1), (0, 1))
    with pytest.raises(InvalidInputError):
        bethe_residual(spec, Sector.of(spec, 2), [0.5])


def test_rational_form_examples():
    spec = single_site(-1)
    sec = Sector.of(spec, 1)
    np.testing.assert_allclose(rational_form_residual(spec, sec, [0]), [0], atol=1e-15)
    with pytest.raises(PoleError) as info:
        rational_form_residual(spec, sec, [0.5])
    assert info.value.kind == "site" and info.value.indices == (0, 0)
    # z_1 + l_1 = z_2 - l_2 = 1/2: the cleared form vanishes at t = 1/2, yet a
    # denominator of the rational form vanishes there too
    spec = ModelSpec.xxx((1, 1), (0, 1))
    sec = Sector.of(spec, 1)
    assert normalized_residual(spec, sec, [0.5]) == 0
    with pytest.raises(PoleError):
        rational_form_residual(spec, sec, [0.5])
    spec = ModelSpec.xxx((1, 1), (0.2 + 0.1j, 1.3 - 0.4j))
    mid = (spec.z[0] + spec.z[1]) / 2
    np.testing.assert_allclose(rational_form_residual(spec, sec, [mid]), [0], atol=1e-14)


def test_pair_pole_is_reported():
    spec = ModelSpec.xxx((1, 1), (0, 3), mu=0.3)
    with pytest.raises(PoleError) as info:
        rational_form_residual(spec, Sector.of(spec, 2), [1.2, 0.2])
    assert info.value.kind == "root"


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    for make in (random_xxx, random_xxz):
        spec, sec = make(rng, k_max=3)
        t = rng.normal(size=sec.k) + 1j * rng.normal(size=sec.k)
        jac = bethe_jacobian(spec, sec, t)
        h = 1e-6
        for b in range(sec.k):
            d = np.zeros(sec.k, complex)
            d[b] = h
            fd = (bethe_residual(spec, sec, t + d) - bethe_residual(spec, sec, t - d)) / (2 * h)
            np.testing.assert_allclose(jac[:, b], fd, rtol=1e-6, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rational_and_cleared_forms_agree(seed):
    # on solutions both vanish; off solutions both are nonzero
    from bethekit import solve, classify
    rng = np.random.default_rng(seed)
    make = random_xxx if seed % 2 else random_xxz
    spec, sec = make(rng)
    for rs in solve(spec, sec).solutions:
        c = classify(spec, sec, rs)
        if not c.admissible or c.near_plus_points or c.near_minus_points:
            continue
        lhs_scale = np.max(np.abs(rational_form_residual(spec, sec, rs.array() + 0.1)))
        assert np.max(np.abs(rational_form_residual(spec, sec, rs))) <= 1e-8 * max(1, lhs_scale)
    t = rng.normal(size=sec.k) + 1j * rng.normal(size=sec.k)
    assert normalized_residual(spec, sec, t) > 1e-6
    assert np.max(np.abs(rational_form_residual(spec, sec, t))) > 1e-8


@settings(max_examples=50, deadline=None)
@given(st.lists(cplx, min_size=1, max_size=4), st.integers(0, 2**32 - 1))
def test_residual_is_permutation_invariant(roots, seed):
    rng = np.random.default_rng(seed)
    spec, _ = random_xxz(rng)
    sec = Sector.of(spec, len(roots))
    perm = rng.permutation(len(roots))
    a = bethe_residual(spec, sec, RootSet(tuple(roots)))
    b = bethe_residual(spec, sec, RootSet(tuple(roots[i] for i in perm)))
    np.testing.assert_array_equal(a, b)


def test_normalized_residual_is_scale_free():
    spec = ModelSpec.xxx((1, 1), (0, 1))
    sec = Sector.of(spec, 1)
    assert normalized_residual(spec, sec, [0.5]) == 0
    assert 0 < normalized_residual(spec, sec, [0.7]) <= 1


# -- canonical order ----------------------------------------------------------

def test_canonicalize_examples():
    assert canonicalize([1, -1]).roots == (-1, 1)
    assert canonicalize([]).roots == ()
    assert canonicalize([1j, 1j, 0]).roots == (0, 1j, 1j)


def test_canonical_ties_ordered_by_imaginary_part():
    rs = canonicalize([1 + 2j, 1 + 1e-12 - 1j])
    assert rs.roots[0].imag == -1


@settings(max_examples=100, deadline=None)
@given(st.lists(cplx, max_size=6))
def test_canonicalize_is_idempotent(roots):
    once = canonicalize(roots)
    assert canonicalize(once.roots).roots == once.roots


def test_rootset_equality_is_tolerant_and_order_free():
    assert RootSet((1, 2j)) == RootSet((2j + 1e-12, 1))
    assert RootSet((1, 2j)) != RootSet((1, 2j + 1e-3))
    with pytest.raises(TypeError):
        hash(RootSet((1,)))


# -- Drinfeld polynomials -----------------------------------------------------

def test_drinfeld_examples():
    np.testing.assert_allclose(drinfeld_polynomial(ModelSpec.xxx((1,), (0,))).coef, [-0.5, 1])
    np.testing.assert_allclose(drinfeld_polynomial(ModelSpec.xxx((2,), (0,))).coef, [0, -1, 1])
    spec = ModelSpec.xxz((2,), (1,), gamma=0.45)
    q2 = spec.qpow(2)
    np.testing.assert_allclose(drinfeld_polynomial(spec).coef, [q2, -(q2 + 1), 1], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_drinfeld_degree_and_monic(seed):
    rng = np.random.default_rng(seed)
    spec, _ = (random_xxx if seed % 2 else random_xxz)(rng, two_ell_max=4)
    poly = drinfeld_polynomial(spec)
    assert poly.degree() == sum(spec.two_ell)
    assert poly.coef[-1] == 1
    u = complex(*rng.normal(size=2))
    assert close(poly(u), eval_drinfeld(spec, u), 1e-9)
    assert len(drinfeld_roots(spec)) == sum(spec.two_ell)


# -- q-numbers ----------------------------------------------------------------

def test_q_number_examples():
    q = cmath.exp(0.37j) * 1.1
    assert close(q_number(1, q), 1)
    assert q_number(0, q) == 0
    assert close(q_number(2, q), q + 1 / q)
    with pytest.raises(InvalidInputError):
        q_number(2, 1)
    with pytest.raises(InvalidInputError):
        q_number(2, -1)


@settings(max_examples=100, deadline=None)
@given(st.integers(-6, 6), st.floats(0.2, 3.0), st.floats(0.1, 3.0))
def test_q_number_symmetries(r, mod, arg):
    q = mod * cmath.exp(1j * arg)
    if abs(q - 1 / q) < 1e-3:
        return
    assert close(q_number(r, q), q_number(r, 1 / q), 1e-8)
    assert close(q_number(-r, q), -q_number(r, q), 1e-8)
