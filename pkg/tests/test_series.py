from fractions import Fraction

import pytest

from shadow_orbits.series import ONE, Poly, RationalFunc, geometric_factor


def test_poly_basics():
    p = Poly([1, 2, 0, 3])
    q = Poly([0, 1])
    assert (p + q).coeffs == (1, 3, 0, 3)
    assert (p * q).coeffs == (0, 1, 2, 0, 3)
    assert Poly([0, 0]) == Poly()
    assert p.coeff(5) == 0
    assert Poly.term(3, 7).coeffs == (0, 0, 0, 7)
    assert p.substitute_scaled_t(Fraction(1, 2)).coeffs == (1, 1, 0, Fraction(3, 8))


def test_rational_series_and_equality():
    geo = RationalFunc(ONE, ONE - Poly.term(1, 3))  # 1 / (1 - 3t)
    assert geo.series(5) == [1, 3, 9, 27, 81]
    same = RationalFunc(Poly([2]), (ONE - Poly.term(1, 3)) * Poly([2]))
    assert geo.equals(same)
    assert not geo.equals(RationalFunc(ONE, ONE - Poly.term(1, 2)))
    with pytest.raises(ZeroDivisionError):
        RationalFunc(ONE, Poly())
    with pytest.raises(ZeroDivisionError):
        RationalFunc(ONE, Poly.term(1, 1)).series(3)


def test_geometric_factor():
    x = Poly.term(2, 5)
    f = geometric_factor(x)  # 5t^2 / (1 - 5t^2)
    assert f.series(7) == [0, 0, 5, 0, 25, 0, 125]
    with pytest.raises(ValueError):
        geometric_factor(Poly([1]))


def test_arithmetic_mixes_exactly():
    f = RationalFunc(Poly([1]), ONE - Poly.term(1, Fraction(1, 5)))
    g = f + RationalFunc.constant(Fraction(1, 3))
    series = g.series(3)
    assert series[0] == Fraction(4, 3)
    assert series[1] == Fraction(1, 5)
    json_form = g.to_json()
    assert json_form["denominator_t"][1] == [-1, 5]
