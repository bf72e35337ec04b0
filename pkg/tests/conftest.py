import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from chiral_calc.algebra import AlgebraContext, Kind, Profile, generator
from chiral_calc.brst import BrstComplex, Potential
from chiral_calc.polyvector import Polyvector

settings.register_profile(
    "ci", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


def potential(D, weights, terms, a=None):
    """``terms`` is a list of (exponent tuple, coefficient)."""
    f = Polyvector(D)
    for exps, c in terms:
        f = f + Polyvector.monomial(D, exps, (), c)
    return Potential(f, weights, a)


def xpow(a, w=1):
    return potential(1, (w,), [((a,), 1)])


@pytest.fixture
def gens():
    """x, y, phi, psi on D=1 in the polyvector profile."""
    ctx = AlgebraContext(1, Profile.POLYVECTOR)
    return ctx, [generator(ctx, k, 1) for k in Kind]


@pytest.fixture(scope="session")
def cubic():
    return BrstComplex.build(xpow(3))


F = Fraction


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
