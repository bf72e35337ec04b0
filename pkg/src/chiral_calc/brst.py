"""Chiral critical locus of a polynomial potential and its twisted currents."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .algebra import (
    AlgebraContext,
    Grading,
    Kind,
    Profile,
    VAElement,
    all_generators,
    generator,
    grading,
    is_primary,
    lambda_bracket,
    nth_product,
    normal_product,
    translate,
    vacuum,
)
from .freefield import CurrentSet, embed_polyvector, theta_currents, verify_top_facts
from .polyvector import Polyvector, divergence, schouten_with_function
from .report import Report


class InhomogeneousPotential(ValueError):
    def __init__(self, offending: dict):
        self.offending = offending
        listing = ", ".join(f"{m} (weight {w})" for m, w in offending.items())
        super().__init__(f"potential is not homogeneous: {listing}")


@dataclass(frozen=True)
class Potential:
    """Polynomial ``f`` with optional coordinate weights.

    With ``weights`` given, ``f`` must be homogeneous; ``a`` is inferred when
    omitted and ``b`` is the weight of the standard volume form.
    """

    f: Polyvector
    weights: tuple | None = None
    a: int | None = None
    source: str = ""

    def __post_init__(self):
        if any(key[1] for key, _c in self.f.items()):
            raise ValueError("a potential is a function: no psi factors allowed")
        if self.weights is None:
            return
        w = tuple(int(x) for x in self.weights)
        if len(w) != self.f.D:
            raise ValueError(f"expected {self.f.D} weights, got {len(w)}")
        if any(x == 0 for x in w):
            raise ValueError("coordinate weights must be nonzero")
        object.__setattr__(self, "weights", w)
        per_term = {}
        for (xexp, _), _c in self.f.items():
            mono = Polyvector.monomial(self.f.D, xexp).render()
            per_term[mono] = sum(a * b for a, b in zip(w, xexp))
        found = set(per_term.values())
        if len(found) > 1 or (self.a is not None and found and found != {self.a}):
            raise InhomogeneousPotential(per_term)
        a = self.a if self.a is not None else (found.pop() if found else None)
        if a is None or a < 1:
            raise ValueError(f"homogeneity weight must be a positive integer, got {a}")
        object.__setattr__(self, "a", int(a))

    @property
    def D(self) -> int:
        return self.f.D

    @property
    def b(self) -> int:
        return sum(self.weights)

    @property
    def homogeneous(self) -> bool:
        return self.weights is not None

    def label(self) -> str:
        return self.source or self.f.render()


def rank(D: int, b: int, a: int) -> Fraction:
    if a == 0:
        raise ZeroDivisionError("homogeneity weight a must be nonzero")
    return Fraction(D) - Fraction(2 * b, a)


def brst_charge(f: Potential | Polyvector, cs: CurrentSet) -> VAElement:
    """``G_(0) f``; checked against ``sum_j d_j f phi^j`` and primarity."""
    if cs.profile is not Profile.POLYVECTOR:
        raise ValueError("the BRST charge is built from the polyvector currents")
    poly = f.f if isinstance(f, Potential) else f
    ctx = cs.ctx
    charge = nth_product(cs.G, 0, embed_polyvector(poly, ctx))
    local = VAElement(ctx)
    for j in range(1, ctx.D + 1):
        local = local + normal_product(embed_polyvector(poly.d_x(j), ctx), generator(ctx, Kind.PHI, j))
    if charge != local:
        raise AssertionError(f"G_(0)f = {charge} but sum d_j f phi^j = {local}")
    if charge:
        if not is_primary(charge, cs.L, 1):
            raise AssertionError("G_(0)f is not a weight-one primary")
        if grading(charge, Grading.FERMION) != -1:
            raise AssertionError("G_(0)f does not have fermion degree -1")
    return charge


@dataclass(frozen=True)
class BrstComplex:
    potential: Potential
    currents: CurrentSet
    charge: VAElement
    twisted: CurrentSet | None = None

    @classmethod
    def build(cls, potential: Potential) -> BrstComplex:
        cs = theta_currents(potential.D)
        return cls(potential, cs, brst_charge(potential, cs))

    @property
    def ctx(self) -> AlgebraContext:
        return self.currents.ctx

    def embed(self, p: Polyvector) -> VAElement:
        return embed_polyvector(p, self.ctx)

    def d(self, a: VAElement) -> VAElement:
        return differential(self, a)


def differential(bc: BrstComplex, a: VAElement) -> VAElement:
    return nth_product(bc.charge, 0, a)


def weight_zero_check(bc: BrstComplex, p: Polyvector) -> bool:
    lhs = differential(bc, bc.embed(p))
    rhs = bc.embed(schouten_with_function(bc.potential.f, p))
    return lhs == rhs


def divergence_check(cs: CurrentSet, p: Polyvector) -> bool:
    lhs = nth_product(cs.G, 1, embed_polyvector(p, cs.ctx))
    return lhs == embed_polyvector(divergence(p), cs.ctx)


def euler_field(weights: Sequence[int], bc: BrstComplex | None = None) -> Polyvector:
    """``sum_i w_i x^i psi^i``; with ``bc`` also checks ``d xi = a f``."""
    D = len(weights)
    if any(w == 0 for w in weights):
        raise ValueError("weights must be nonzero")
    xi = Polyvector(D)
    for i, w in enumerate(weights, 1):
        xi = xi + Polyvector.x(D, i) * Polyvector.psi(D, i) * w
    if bc is not None:
        pot = bc.potential
        if pot.a is None:
            raise ValueError("the potential carries no homogeneity data")
        if differential(bc, bc.embed(xi)) != pot.a * bc.embed(pot.f):
            raise ValueError(f"f is not homogeneous of weight {pot.a} for weights {tuple(weights)}")
    return xi


def compat_suite(bc: BrstComplex) -> Report:
    cs = bc.currents
    rep = Report(f"compatibilities of the differential with top currents, f = {bc.potential.label()}")
    f = bc.embed(bc.potential.f)
    dL, dG, dJ, dQ = (differential(bc, x) for x in (cs.L, cs.G, cs.J, cs.Q))
    rep.add("d L = 0", not dL, value=dL.render())
    rep.add("d G = 0", not dG, value=dG.render())
    # the sign is forced by d psi = df and J = -phi psi; it is also the only
    # sign for which the twisted J below is closed
    rep.add("d J = G_(0)f", dJ == bc.charge, value=dJ.render())
    rep.add("d Q = df", dQ == translate(f), value=dQ.render())
    return rep


def square_zero_check(bc: BrstComplex) -> Report:
    rep = Report(f"BRST charge self-locality, f = {bc.potential.label()}")
    br = lambda_bracket(bc.charge, bc.charge)
    rep.add("charge_(n) charge = 0 for all n >= 0", br == {},
            **{f"n={n}": v.render() for n, v in br.items()})
    gens = all_generators(bc.ctx, 1)
    sq = [g for g in gens if differential(bc, differential(bc, g))]
    rep.add("d^2 = 0 on generators", not sq, offending=[g.render() for g in sq])
    return rep


def twisted_currents(bc: BrstComplex) -> BrstComplex:
    pot = bc.potential
    if not pot.homogeneous:
        raise ValueError("twisting needs a homogeneous potential")
    cs = bc.currents
    xi = bc.embed(euler_field(pot.weights, bc))
    lift = nth_product(cs.G, 0, xi)
    inv_a = Fraction(1, pot.a)
    tw = CurrentSet(
        L=cs.L,
        J=cs.J + inv_a * lift,
        Q=cs.Q - inv_a * translate(xi),
        G=cs.G,
        rank=rank(pot.D, pot.b, pot.a),
        profile=cs.profile,
    )
    return replace(bc, twisted=tw)


def verify_theorem(bc: BrstComplex) -> Report:
    if bc.twisted is None:
        bc = twisted_currents(bc)
    pot = bc.potential
    cs, tw = bc.currents, bc.twisted
    ctx = bc.ctx
    a, b = pot.a, pot.b
    omega = vacuum(ctx)
    xi = bc.embed(euler_field(pot.weights))
    lift = nth_product(cs.G, 0, xi)
    f = bc.embed(pot.f)
    rep = Report(f"twisted topological structure, f = {pot.label()}, w = {pot.weights}")
    rep.add("d xi = a f", differential(bc, xi) == a * f)
    rep.add("d G_(0)xi = -a G_(0)f", differential(bc, lift) == -a * bc.charge)
    rep.add("d(dxi) = a df", differential(bc, translate(xi)) == a * translate(f))
    for name, cur in tw.as_dict().items():
        val = differential(bc, cur)
        rep.add(f"d {name}^f = 0", not val, value=val.render())
    rep.add("G_(1) xi = b", nth_product(cs.G, 1, xi) == b * omega)
    rep.add("J_(1) G_(0)xi = -b", nth_product(cs.J, 1, lift) == -b * omega)
    rep.add("(G_(0)xi)_(1) J = -b", nth_product(lift, 1, cs.J) == -b * omega)
    rep.add("(G_(0)xi)_(0) J = 0", not nth_product(lift, 0, cs.J))
    dxi = translate(xi)
    mode_ok = True
    for cur in cs.as_dict().values():
        mode_ok &= nth_product(dxi, 1, cur) == -nth_product(xi, 0, cur)
        mode_ok &= nth_product(dxi, 2, cur) == -2 * nth_product(xi, 1, cur)
    rep.add("(dxi)_(1) = -xi_(0), (dxi)_(2) = -2 xi_(1)", mode_ok)
    gens = all_generators(ctx, 1)
    rep.add("Q^f_(0) = Q_(0) on generators",
            all(nth_product(tw.Q, 0, g) == nth_product(cs.Q, 0, g) for g in gens))
    top = verify_top_facts(tw)
    rep.extend(top, prefix="twisted: ")
    rep.values["rank"] = str(tw.rank)
    rep.values["D"] = pot.D
    rep.values["a"] = a
    rep.values["b"] = b
    return rep


def polyvector_checks(bc: BrstComplex, samples: int = 50, seed: int = 0) -> Report:
    """Weight-zero restriction and divergence on seeded random polyvectors."""
    import random

    from .polyvector import random_polyvector

    rng = random.Random(seed)
    D = bc.potential.D
    cases = [random_polyvector(D, rng) for _ in range(samples)]
    rep = Report(f"weight-zero checks on {samples} random polyvectors, f = {bc.potential.label()}")
    bad = [p.render() for p in cases if not weight_zero_check(bc, p)]
    rep.add("d = {f, -} on weight zero", not bad, offending=bad[:3])
    bad = [p.render() for p in cases if not divergence_check(bc.currents, p)]
    rep.add("G_(1) = divergence on weight zero", not bad, offending=bad[:3])
    return rep
