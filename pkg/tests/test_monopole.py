import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistorkit.monopole import (
    ChartError,
    RationalMapPoint,
    act,
    cosh_sqrt,
    generator,
    in_stabilizer_lattice,
    moment_value,
    omega,
    orbit_table,
    scaling_residual,
    sinhc_sqrt,
    stabilizer_check,
    symplectic_residual,
    tangent_basis,
)

small = st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False)


def point(a, c):
    return RationalMapPoint.from_ac(a, c)


def close(m1, m2, tol):
    return max(abs(x - y) for x, y in zip(m1.as_tuple(), m2.as_tuple())) <= tol


def test_constraint_enforced_on_construction():
    with pytest.raises(ValueError):
        RationalMapPoint(1, 1, 1)


def test_entire_functions_match_closed_forms_and_series():
    assert cosh_sqrt(0) == 1 and sinhc_sqrt(0) == 1
    for x in (0.3 - 2j, -4.0, 2.5j):
        s = cmath.sqrt(x)
        assert cosh_sqrt(x) == pytest.approx(cmath.cosh(s), rel=1e-14)
        assert sinhc_sqrt(x) == pytest.approx(cmath.sinh(s) / s, rel=1e-14)
    # the series branch agrees with the closed form just below the switch
    for x in (0.99e-6, -0.99e-6j, 3e-7):
        s = cmath.sqrt(x)
        assert cosh_sqrt(x) == pytest.approx(cmath.cosh(s), rel=1e-15)
        assert sinhc_sqrt(x) == pytest.approx(cmath.sinh(s) / s, rel=1e-15)


def test_identity_at_zero():
    m = point(0.3 + 0.2j, 0.5 - 1j)
    assert act(0, m) == m


def test_origin_orbit():
    lam, c = 0.7 - 0.2j, 0.4 + 0.3j
    beta = cmath.sqrt(c)
    m2 = act(lam, RationalMapPoint(0, 1, c))
    assert m2.a == pytest.approx(cmath.sinh(lam * beta) / beta, abs=1e-14)
    assert m2.b == pytest.approx(cmath.cosh(lam * beta), abs=1e-14)
    assert m2.constraint_residual() <= 1e-14


def test_zero_c_handled_by_entire_forms():
    m2 = act(0.7, RationalMapPoint(0.5, 1, 0))
    assert (m2.a, m2.b, m2.c) == (0.5 + 0.7, 1, 0)


@given(small, small, small, small)
def test_group_law_and_constraint(a, c, l1, l2):
    m = point(a, c)
    assert close(act(l1, act(l2, m)), act(l1 + l2, m), 1e-12)
    assert act(l1, m).constraint_residual() <= 1e-12
    assert scaling_residual(l1, m) <= 1e-12


@given(small, small, small)
def test_branch_independence(a, c, lam):
    # the action only sees beta**2, so flipping the branch changes nothing
    m = point(a, c)
    beta = cmath.sqrt(c)
    m2 = act(lam, m)
    for b in (beta, -beta):
        assert abs(m2.p(b) - cmath.exp(lam * b) * m.p(b)) <= 1e-12


@given(small, small, small)
def test_moment_constant_on_orbits(a, c, lam):
    m = point(a, c)
    assert moment_value(act(lam, m)) == moment_value(m)


def test_moment_examples():
    assert moment_value(RationalMapPoint(0, 1, 0)) == 0


def test_moment_is_hamiltonian_for_generator():
    """iota_X omega = d(c/2), checked on both tangent fields by direct evaluation."""
    rng = np.random.default_rng(2)
    for _ in range(20):
        m = point(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        X = generator(m)
        for V in tangent_basis(m):
            assert omega(m.as_tuple(), X, V) == pytest.approx(V[2] / 2, abs=1e-12)


def test_generator_is_derivative_of_action():
    m = point(0.4 - 0.1j, 0.8 + 0.5j)
    h = 1e-6
    fd = [(p - q) / (2 * h) for p, q in zip(act(h, m).as_tuple(), act(-h, m).as_tuple())]
    assert np.allclose(fd, generator(m), atol=1e-9)


def test_symplectic_residual_decays_quadratically():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = point(complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(0.2, 1, 2)))
        lam = complex(*rng.uniform(-1, 1, 2))
        r = [symplectic_residual(lam, m, h) for h in (1e-3, 5e-4, 2.5e-4)]
        assert 3.5 < r[0] / r[1] < 4.5 and 3.5 < r[1] / r[2] < 4.5
        assert symplectic_residual(lam, m, 1e-4) <= 1e-6


def test_symplectic_residual_at_zero_parameter_vanishes_with_h():
    m = point(0.3, 0.6 + 0.2j)
    r = [symplectic_residual(0, m, h) for h in (1e-2, 1e-3)]
    assert r[1] < r[0] / 50 and r[1] <= 1e-7


def test_symplectic_residual_outside_chart():
    with pytest.raises(ChartError, match="outside the chart"):
        symplectic_residual(0.3, RationalMapPoint(0.2, 1, 0))


def test_stabilizer_lattice():
    m = point(0.3 - 0.2j, 0.7 + 0.4j)
    beta = cmath.sqrt(m.c)
    assert stabilizer_check(2j * math.pi / beta, m)
    assert stabilizer_check(-4j * math.pi / beta, m)
    assert not stabilizer_check(1j * math.pi / beta, m)
    assert stabilizer_check(0, m)


# jitter is kept away from the tolerance scale where both tests are equally uncertain
@given(
    small,
    st.floats(0.1, 2),
    st.floats(0, 2 * math.pi),
    st.integers(-2, 2),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1, allow_nan=False, allow_infinity=False),
)
def test_stabilizer_equivalent_to_lattice(a, r, theta, n, jitter):
    c = r * cmath.exp(1j * theta)
    m = point(a, c)
    beta = cmath.sqrt(c)
    for lam in (2j * math.pi * n / beta, 2j * math.pi * n / beta + 0.1 * jitter):
        assert stabilizer_check(lam, m) == in_stabilizer_lattice(lam, c)


def test_orbit_table():
    m = point(0.3 + 0.1j, 0.7 - 0.2j)
    rows = orbit_table(m, [0, 0.5, 1j])
    assert [r.stabilizes for r in rows] == [True, False, False]
    assert all(r.moment == moment_value(m) for r in rows)
