import random

from chiral_calc.polyvector import Polyvector, divergence, random_polyvector, schouten_with_function


def test_koszul_sign():
    p1, p2 = Polyvector.psi(2, 1), Polyvector.psi(2, 2)
    assert p2 * p1 == -(p1 * p2)
    assert (p1 * p1).render() == "0"


def test_derivatives():
    x1, p1 = Polyvector.x(1, 1), Polyvector.psi(1, 1)
    f = x1 ** 3
    assert f.d_x(1) == x1 * x1 * 3
    assert (x1 * p1).d_psi(1) == x1


def test_schouten_and_divergence():
    x1, p1 = Polyvector.x(1, 1), Polyvector.psi(1, 1)
    f = x1 ** 2
    g = x1 ** 3 * p1
    # {f, g psi} = g f'
    assert schouten_with_function(f, g) == x1 ** 4 * 2
    assert divergence(g) == x1 * x1 * 3
    assert divergence(x1 ** 5) == Polyvector(1)


def test_divergence_squares_to_zero():
    rng = random.Random(3)
    for _ in range(30):
        p = random_polyvector(3, rng, max_psi=3)
        assert divergence(divergence(p)) == Polyvector(3)


def test_weight():
    x1, x2, p1 = Polyvector.x(2, 1), Polyvector.x(2, 2), Polyvector.psi(2, 1)
    assert (x1 * x2 * p1).weight((1, 2)) == {2}
    assert (x1 + x2).weight((1, 2)) == {1, 2}
