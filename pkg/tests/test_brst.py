from fractions import Fraction

import pytest

from chiral_calc.algebra import Kind, generator, nth_product
from chiral_calc.brst import (
    BrstComplex,
    InhomogeneousPotential,
    Potential,
    compat_suite,
    euler_field,
    polyvector_checks,
    rank,
    square_zero_check,
    twisted_currents,
    verify_theorem,
)
from chiral_calc.polyvector import Polyvector

from conftest import potential, xpow

FAMILY = [
    (potential(1, (1,), [((2,), 1)]), Fraction(0)),
    (potential(1, (1,), [((3,), 1)]), Fraction(1, 3)),
    (potential(1, (1,), [((5,), 1)]), Fraction(3, 5)),
    (potential(2, (1, 1), [((3, 0), 1), ((0, 3), 1)]), Fraction(2, 3)),
    (potential(2, (1, 2), [((4, 0), 1), ((0, 2), 1)]), Fraction(1, 2)),
]


def test_potential_validation():
    assert xpow(3).a == 3
    assert potential(2, (1, 2), [((4, 0), 1), ((0, 2), 1)]).a == 4
    with pytest.raises(InhomogeneousPotential) as err:
        potential(1, (1,), [((2,), 1), ((1,), 1)])
    assert err.value.offending == {"x1^2": 2, "x1": 1}
    with pytest.raises(ValueError):
        Potential(Polyvector.psi(1, 1), (1,))
    with pytest.raises(ValueError):
        potential(1, (0,), [((2,), 1)])
    with pytest.raises(ValueError):
        potential(1, (-1,), [((2,), 1)])  # a = -2 is not allowed


def test_rank_formula():
    assert rank(1, 1, 3) == Fraction(1, 3)
    with pytest.raises(ZeroDivisionError):
        rank(1, 1, 0)


def test_charge_local_formula():
    bc = BrstComplex.build(xpow(2))
    ctx = bc.ctx
    # G_(0) x^2 = 2 :phi x:
    assert bc.charge.render() == "2 :phi1 x1:"
    assert bc.d(generator(ctx, Kind.PSI, 1)) == 2 * generator(ctx, Kind.X, 1)


def test_differential_on_generators(cubic):
    ctx = cubic.ctx
    x, y, phi, psi = (generator(ctx, k, 1) for k in Kind)
    assert cubic.d(x) == 0
    assert cubic.d(phi) == 0
    assert cubic.d(psi) == 3 * nth_product(x, -1, x)
    # d y = -f'' phi
    assert cubic.d(y).render() == "-6 :phi1 x1:"


@pytest.mark.parametrize("pot", [p for p, _ in FAMILY[:4]] + [FAMILY[4][0]])
def test_compat_and_square_zero(pot):
    bc = BrstComplex.build(pot)
    assert compat_suite(bc).ok
    assert square_zero_check(bc).ok
    assert polyvector_checks(bc, 50, seed=1).ok


def test_literal_J_sign_contradicts_twisted_closedness(cubic):
    """With d J = -G_(0)f the twisted J could not be closed: d(G_(0)xi) = -a G_(0)f."""
    cs = cubic.currents
    a = cubic.potential.a
    xi = cubic.embed(euler_field((1,)))
    lift = nth_product(cs.G, 0, xi)
    assert cubic.d(lift) == -a * cubic.charge
    literal_dJ = -cubic.charge
    assert literal_dJ + Fraction(1, a) * cubic.d(lift) != 0
    assert cubic.d(cs.J) + Fraction(1, a) * cubic.d(lift) == 0


def test_euler_field_homogeneity_guard(cubic):
    assert euler_field((1,), cubic) == Polyvector.x(1, 1) * Polyvector.psi(1, 1)
    with pytest.raises(ValueError):
        euler_field((2,), cubic)
    with pytest.raises(ValueError):
        euler_field((0,))


@pytest.mark.parametrize("pot,expected", FAMILY)
def test_twisted_theorem(pot, expected):
    bc = twisted_currents(BrstComplex.build(pot))
    rep = verify_theorem(bc)
    assert rep.ok, rep.failed()
    assert bc.twisted.rank == expected


def test_twisted_currents_render(cubic):
    tw = twisted_currents(cubic).twisted
    assert tw.J.render() == "1/3 :y1 x1: - 2/3 :phi1 psi1:"
    assert tw.Q.render() == "-1/3 :dpsi1 x1: + 2/3 :dx1 psi1:"


def test_twisting_needs_weights():
    bc = BrstComplex.build(potential(1, None, [((3,), 1)]))
    with pytest.raises(ValueError):
        twisted_currents(bc)
