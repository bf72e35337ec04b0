import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chiral_calc.brst import BrstComplex
from chiral_calc.characters import (
    K,
    T,
    U,
    QSeries,
    ThetaPole,
    chain_character,
    compare_characters,
    direct_character,
    free_field_character,
    localization_character,
    origin_fixed_point,
    pre_substitution_character,
    substitute_t,
    theta,
    theta_at,
    theta_quotient,
)
from chiral_calc.cohomology import SliceComplex, direct_sum

from conftest import xpow

q_, u_ = sympy.symbols("q u")


def brute_theta(k, N):
    """Expand the truncated triple product with sympy; returns {n: expr in u}."""
    w = u_ ** k
    prod = sympy.Integer(1)
    for i in range(N + 1):
        factors = [1 - q_ ** i * w]
        if i >= 1:
            factors += [1 - q_ ** i / w, 1 - q_ ** i]
        for fac in factors:
            prod = sympy.expand(prod * fac)
            prod = sum(prod.coeff(q_, n) * q_ ** n for n in range(N + 1))
    return {n: sympy.expand(prod.coeff(q_, n)) for n in range(N + 1)}


def as_expr(c):
    return sympy.expand(c.as_expr().subs(sympy.Symbol("u"), u_))


@pytest.mark.parametrize("k", [1, -1, 2, -3, 5])
def test_theta_matches_brute_force(k):
    N = 6
    series = theta(k, N)
    oracle = brute_theta(k, N)
    for n in range(N + 1):
        assert sympy.simplify(as_expr(series.coeffs[n]) - oracle[n]) == 0


def test_theta_low_orders():
    s = theta(1, 1)
    assert s.coeffs[0] == 1 - U
    # (1 - z)(-z - 1/z - 1) = z^2 - 1/z
    assert s.coeffs[1] == U ** 2 - 1 / U


def test_theta_fractional_exponent():
    assert theta(Fraction(1, 3), 2, a=3) == theta_at(U, 3, 2)
    with pytest.raises(ValueError):
        theta(Fraction(1, 2), 2, a=3)


def test_theta_of_one_is_zero():
    assert theta(0, 4).is_zero()


def test_theta_reflection():
    # theta(1/w) = -w^-1 theta(w)
    assert theta(-2, 5) == theta(2, 5) * (-U ** -2)


def test_theta_quotient_basics():
    assert theta_quotient([], 3) == 1
    assert theta_quotient([-1], 3).is_zero()
    with pytest.raises(ThetaPole):
        theta_quotient([Fraction(1, 2), 0], 3, a=2)


@pytest.mark.parametrize("alpha,a", [(1, 1), (Fraction(1, 3), 3), (Fraction(-1, 5), 5), (Fraction(2, 3), 3)])
def test_theta_quotient_against_oracle(alpha, a):
    N = 6
    quot = theta_quotient([alpha], N, a)
    num = brute_theta(int((1 + alpha) * a), N)
    den = brute_theta(int(alpha * a), N)
    for n in range(N + 1):
        lhs = sum(as_expr(quot.coeffs[i]) * den[n - i] for i in range(n + 1))
        assert sympy.simplify(lhs - num[n]) == 0


alphas = st.lists(st.sampled_from([Fraction(k, 3) for k in (-4, -2, -1, 1, 2, 4)]), max_size=2)


@settings(max_examples=25)
@given(alphas, alphas)
def test_theta_quotient_multiplicative(a1, a2):
    N = 3
    assert theta_quotient(a1 + a2, N, 3) == theta_quotient(a1, N, 3) * theta_quotient(a2, N, 3)


@settings(max_examples=25)
@given(st.sampled_from([Fraction(k, 2) for k in (-3, -1, 1, 2, 5)]), st.integers(0, 4))
def test_theta_truncation_coherence(r, N2):
    assert theta(r, 5, 2).truncate(N2) == theta(r, N2, 2)


coeffs = st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-3, 3)), max_size=3)


def series_from(data, N=3):
    return QSeries(1, N, [sum((c * U ** k * T ** l for k, l, c in row), K.zero) for row in data])


@settings(max_examples=50)
@given(st.lists(coeffs, min_size=1, max_size=4), st.lists(coeffs, min_size=1, max_size=4))
def test_substitute_t_is_a_ring_homomorphism(d1, d2):
    s1, s2 = series_from(d1), series_from(d2)
    assert substitute_t(s1 * s2) == substitute_t(s1) * substitute_t(s2)
    assert substitute_t(s1 + s2) == substitute_t(s1) + substitute_t(s2)


def test_substitute_t_examples():
    s = QSeries(1, 1, [T ** 2, U])
    assert substitute_t(s) == QSeries(1, 1, [U ** 2, U])
    assert not substitute_t(s).has_t and s.has_t


def test_series_division_and_errors():
    s = QSeries(2, 3, [1 - U, U])
    assert (s / s) == 1
    with pytest.raises(ZeroDivisionError):
        QSeries(2, 3, [0, 1]).inverse()
    with pytest.raises(ValueError):
        QSeries(2, 3) + QSeries(3, 3)
    with pytest.raises(ValueError):
        s.truncate(4)


def test_series_json():
    s = QSeries(3, 2, [1 + U, T / U, Fraction(1, 2) / (1 - U)])
    data = json.loads(json.dumps(s.to_dict()))
    assert data["a"] == 3 and data["N"] == 2 and data["denominator_free"] is False
    assert data["terms"][0] == {"q": 0, "coeff": [{"u": 0, "t": 0, "c": "1"}, {"u": 1, "t": 0, "c": "1"}]}
    assert data["terms"][1] == {"q": 1, "coeff": [{"u": -1, "t": 1, "c": "1"}]}
    assert "denom" in data["terms"][2]


def test_fixed_point_data():
    y = origin_fixed_point((1,), 3)
    assert y.tangent == () and y.w_tot == Fraction(1, 3) and y.literal_w_tot == 0
    assert y.prefactor() == -1 / U
    y2 = origin_fixed_point((2, 3), 6)
    assert y2.tangent == (-2,) and y2.w_tot == Fraction(1, 2)


def test_localization_linearity_and_pole():
    y = origin_fixed_point((1,), 3)
    one = localization_character([y], 3)
    assert localization_character([y, y], 3) == 2 * one
    assert one == theta_quotient([Fraction(-1, 3)], 3, 3) * (-1 / U)
    with pytest.raises(ThetaPole, match="fixed point 0"):
        localization_character([y], 3, literal=True)


def test_pre_substitution_form():
    y = origin_fixed_point((1,), 3)
    pre = pre_substitution_character([y], 3)
    assert pre.has_t
    assert substitute_t(pre) == localization_character([y], 3)
    y2 = origin_fixed_point((2, 3), 6)
    assert substitute_t(pre_substitution_character([y2], 2)) == localization_character([y2], 2)


def test_quadratic_direct_character_is_one():
    dc = direct_character(BrstComplex.build(xpow(2)), 4)
    assert dc.sufficient
    assert dc.collapsed() == 1


def test_cubic_direct_character_low_order(cubic):
    dc = direct_character(cubic, 1)
    s = dc.collapsed()
    # q^0: Jacobian ring 1 + x
    assert s.coeffs[0] == 1 + U
    assert s.coefficient(1, -2) == -1 and s.coefficient(1, 3) == -1
    assert dc.series.coefficient(0, 0, 1) == 1  # the class x at m = 1, j = 0


def test_window_insufficiency_flag(cubic):
    dc = direct_character(cubic, 2, c_window=(-1, 1))
    assert not dc.sufficient and dc.boundary


def partition_chain_counts(weights, a, N, c_max):
    """Signed state counts by (n, c) from the four generator families, one mode at a time."""
    counts = {(0, 0): 1}
    families = []
    for w in weights:
        for k in range(N + 1):
            families.append((k, w, False))         # d^k x
            families.append((k, a - w, True))      # d^k psi
            if k + 1 <= N:
                families.append((k + 1, -w, False))      # d^k y
                families.append((k + 1, w - a, True))    # d^k phi
    bound = c_max + N * a + a
    for n0, c0, odd in families:
        new = {}
        for (n, c), v in counts.items():
            e = 0
            while True:
                nn, cc = n + e * n0, c + e * c0
                if nn > N or abs(cc) > bound or (odd and e > 1):
                    break
                sign = -1 if (odd and e % 2) else 1
                new[(nn, cc)] = new.get((nn, cc), 0) + sign * v
                e += 1
                if n0 == 0 and c0 == 0:
                    break
        counts = new
    return counts


def test_free_field_character_by_slice_counting():
    N = 3
    for pot in (xpow(3), xpow(2)):
        bc = BrstComplex.build(pot)
        sc = SliceComplex(bc)
        a = pot.a
        window = (-a * (N + 1), a * (N + 1))
        counted = chain_character(sc, N, window)
        assert counted == free_field_character(pot.weights, a, N)
        oracle = partition_chain_counts(pot.weights, a, N, window[1])
        for n in range(N + 1):
            for c in range(window[0], window[1] + 1):
                assert counted.coefficient(n, c) == oracle.get((n, c), 0)


def test_cubic_comparison_report(cubic):
    rep = compare_characters(cubic, 2)
    assert rep.ok, rep.failed()
    assert "pole" in rep.values["literal formula discrepancy"]
    assert "w_tot = fibre weight / a = 1/3" in rep.values["convention"]


def test_direct_character_multiplicative():
    N = 1
    f, g = xpow(3, 2), xpow(2, 3)
    fg = direct_sum(f, g)
    prod = direct_character(BrstComplex.build(f), N).collapsed() * direct_character(BrstComplex.build(g), N).collapsed()
    whole = direct_character(BrstComplex.build(fg), N)
    assert whole.sufficient
    assert whole.collapsed() == prod
    assert prod == localization_character([origin_fixed_point((2, 3), 6)], N)
