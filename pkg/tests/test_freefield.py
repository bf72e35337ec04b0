import pytest

from chiral_calc.algebra import Kind, Profile, generator, nth_product
from chiral_calc.freefield import (
    chiral_lift,
    embed_polyvector,
    lift_bracket_matches,
    mirror,
    omega_currents,
    theta_currents,
    vector_field_bracket,
    verify_top_facts,
)
from chiral_calc.polyvector import Polyvector


@pytest.mark.parametrize("D", [1, 2, 3])
@pytest.mark.parametrize("build", [omega_currents, theta_currents])
def test_top_facts(D, build):
    rep = verify_top_facts(build(D))
    assert rep.ok, rep.failed()
    assert rep.values["rank"] == str(D)


def test_rendered_currents_d1():
    om = omega_currents(1)
    assert om.L.render() == ":y1 dx1: + :dphi1 psi1:"
    assert om.J.render() == "-:psi1 phi1:"
    th = theta_currents(1)
    assert th.L.render() == ":y1 dx1: - :phi1 dpsi1:"
    assert th.J.render() == "-:phi1 psi1:"
    assert th.G.render() == ":y1 phi1:"
    assert th.Q.render() == ":dx1 psi1:"


@pytest.mark.parametrize("D", [1, 2, 3])
def test_mirror_involution(D):
    om, th = omega_currents(D), theta_currents(D)
    assert mirror(om) == th
    assert mirror(th) == om
    assert mirror(mirror(om)) == om
    assert mirror(om).profile is Profile.POLYVECTOR


def test_plus_sign_virasoro_is_rejected():
    th = theta_currents(1)
    ctx = th.ctx
    from chiral_calc.algebra import normal_product, translate

    x, y, phi, psi = (generator(ctx, k, 1) for k in Kind)
    wrong = normal_product(translate(x), y) + normal_product(phi, translate(psi))
    rep = verify_top_facts(th.replace(L=wrong))
    assert not rep["virasoro c=0"].passed


def test_doubled_J_fails_exactly_three_items():
    th = theta_currents(2)
    rep = verify_top_facts(th.replace(J=2 * th.J))
    assert rep.failed() == ["J-J OPE = rank/(z-w)^2", "Q-G OPE = L, J, rank", "J-charges Q=+1, G=-1"]


def test_zero_mode_of_J_on_psi():
    th = theta_currents(1)
    psi = generator(th.ctx, Kind.PSI, 1)
    assert nth_product(th.J, 0, psi) == psi


def test_chiral_lift_of_coordinate_field():
    th = theta_currents(1)
    ctx = th.ctx
    lift = chiral_lift(Polyvector.psi(1, 1), th)
    assert lift == generator(ctx, Kind.Y, 1)


def test_euler_lift_zero_mode():
    th = theta_currents(2)
    ctx = th.ctx
    xi = Polyvector.x(2, 1) * Polyvector.psi(2, 1) + Polyvector.x(2, 2) * Polyvector.psi(2, 2)
    lift = chiral_lift(xi, th)
    x1 = embed_polyvector(Polyvector.x(2, 1), ctx)
    p1 = embed_polyvector(Polyvector.psi(2, 1), ctx)
    assert nth_product(lift, 0, x1) == x1
    assert nth_product(lift, 0, p1) == -p1


def test_lift_brackets():
    th = theta_currents(2)
    x1, x2 = Polyvector.x(2, 1), Polyvector.x(2, 2)
    p1, p2 = Polyvector.psi(2, 1), Polyvector.psi(2, 2)
    assert lift_bracket_matches(x1 * x1 * p1, x2 * p1, th)
    assert lift_bracket_matches(x1 * x2 * p2, x2 * x2 * p1, th)


def test_vector_field_bracket_antisymmetric():
    x1, p1 = Polyvector.x(1, 1), Polyvector.psi(1, 1)
    v, w = x1 * x1 * p1, x1 * p1
    assert vector_field_bracket(v, w) == -vector_field_bracket(w, v)
    # [x^2 d, x d] = -x^2 d
    assert vector_field_bracket(v, w) == -(x1 * x1 * p1)


def test_chiral_lift_rejects_bivectors():
    th = theta_currents(2)
    with pytest.raises(ValueError):
        chiral_lift(Polyvector.psi(2, 1) * Polyvector.psi(2, 2), th)
    with pytest.raises(ValueError):
        chiral_lift(Polyvector.psi(1, 1), omega_currents(1))


def test_embed_polyvector_profile_guard():
    with pytest.raises(ValueError):
        embed_polyvector(Polyvector.x(1, 1), omega_currents(1).ctx)
