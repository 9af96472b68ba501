import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rrhermite import dilog, rootsys
from rrhermite.dilog import QSystemSpec, rogers_L, solve, system_spec

def mp_rogers(z):
    z = mpmath.mpf(z)
    return mpmath.polylog(2, z) + mpmath.log(z) * mpmath.log(1 - z) / 2


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_rogers_L_against_mpmath(z):
    assert abs(rogers_L(z) - float(mp_rogers(z))) < 1e-14


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 1 - 1e-4))
def test_rogers_reflection(z):
    assert abs(rogers_L(z) + rogers_L(1 - z) - math.pi ** 2 / 6) < 1e-14


def test_rogers_values():
    assert abs(rogers_L(0.5) - math.pi ** 2 / 12) < 1e-15
    assert rogers_L(1e-300) < 1e-290
    assert abs(dilog.li2(0.3) - float(mpmath.polylog(2, 0.3))) < 1e-15
    with pytest.raises(ValueError):
        rogers_L(1.5)


def test_a_matrix_examples():
    a2 = rootsys.build("A", 2)
    assert dilog.a_matrix(a2) == [[Fraction(4, 3), Fraction(2, 3)], [Fraction(2, 3), Fraction(4, 3)]]
    for n in range(1, 7):
        assert dilog.a_matrix(rootsys.build("A", n), flat=True)[0][0] == Fraction(n, n + 1)
    assert dilog.tadpole_matrix(3) == [[2, 2, 2], [2, 4, 4], [2, 4, 6]]


def test_spec_validation():
    with pytest.raises(ValueError):
        QSystemSpec(((Fraction(1), Fraction(2)), (Fraction(0), Fraction(1))), (Fraction(1),) * 2, (Fraction(1),) * 2)
    with pytest.raises(ValueError):
        QSystemSpec(((Fraction(-1),),), (Fraction(1),), (Fraction(1),))


def test_worked_solutions():
    a1 = solve(system_spec("A1"))
    assert abs(a1.Q[0] - 0.5) < 1e-12 and abs(a1.L - 0.5) < 1e-12
    a3 = solve(system_spec("A3"))
    assert np.allclose(a3.Q, [2 / 3, 3 / 4, 2 / 3], atol=1e-12)
    assert abs(a3.L - 2) < 1e-12
    # L(3/4) + 2 L(2/3) = 2 pi^2/6
    assert abs(rogers_L(0.75) + 2 * rogers_L(2 / 3) - 2 * math.pi ** 2 / 6) < 1e-13
    d4 = solve(system_spec("D4"))
    assert np.allclose(sorted(d4.Q), [0.75, 0.75, 0.75, 8 / 9], atol=1e-12)
    assert abs(d4.L - 3) < 1e-12
    a4 = solve(system_spec("A4"))
    assert abs(a4.L - 20 / 7) < 1e-12
    assert abs(a4.Q[1] - (2 * math.cos(math.pi / 7) - 1)) < 1e-12


def test_a4_minimal_polynomial():
    x = solve(system_spec("A4")).Q[1]
    assert dilog.find_integer_polynomial(x, 3) == (1, 2, -1, -1)
    # independent: mpmath integer relation search
    coeffs = mpmath.findpoly(mpmath.mpf(x), 3, maxcoeff=10, tol=1e-10)
    assert [int(c) for c in coeffs] in ([1, 2, -1, -1], [-1, -2, 1, 1])


@pytest.mark.parametrize("row", dilog.table1(8), ids=lambda r: r.system)
def test_table_rows(row):
    assert row.residual < 1e-9
    assert not row.flagged
    assert row.L_rational == row.L_closed and row.L_flat_rational == row.L_flat_closed
    assert row.ceff_residual < 1e-9


def test_known_table_values():
    row = dilog.table_row("E8")
    assert row.L_flat_rational == Fraction(80, 11)
    assert abs(row.c_eff_flat - 8 / 33) < 1e-12
    for n in range(2, 7):
        assert dilog.table_row(f"C{n}").L_rational == n
        assert dilog.table_row(f"B{n}").L_rational == Fraction(n * (2 * n - 1), n + 1)


@pytest.mark.parametrize("name", ["B2", "B3", "B4", "B5", "B6", "C2", "C3", "C4", "C5", "C6", "F4", "G2"])
@pytest.mark.parametrize("flat", [False, True])
def test_duality(name, flat):
    lt, ld = dilog.duality_check(name, flat)
    assert abs(lt - ld) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tadpole_from_even_a(n):
    out = dilog.tadpole_symmetry(n)
    assert out["palindrome"] < 1e-10
    assert out["half_vs_tadpole"] < 1e-10


@pytest.mark.parametrize("name", ["A5", "B4", "D5", "E6", "F4", "G2", "T3"])
def test_uniqueness_from_random_starts(name):
    assert dilog.uniqueness_check(system_spec(name), starts=10) < 1e-10


@pytest.mark.parametrize("name", ["A3", "B3", "C4", "D4", "G2"])
def test_fixed_point_agrees_with_newton(name):
    spec = system_spec(name)
    a = solve(spec, method="newton")
    b = solve(spec, method="fixed_point")
    assert np.max(np.abs(a.Q - b.Q)) < 1e-9


def test_coincidences():
    for a, b, x, y in dilog.coincidences(6):
        assert abs(x - y) < 1e-10, (a, b)


def test_rational_recognition():
    assert dilog.recognize_rational(20 / 7) == Fraction(20, 7)
    assert dilog.recognize_rational(math.pi) is None
