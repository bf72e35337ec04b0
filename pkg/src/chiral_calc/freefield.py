"""Topological current sets on affine D-space and related constructions."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .algebra import (
    AlgebraContext,
    Grading,
    IdentityFailure,
    Kind,
    Profile,
    VAElement,
    check_virasoro,
    generator,
    grading,
    is_primary,
    lambda_bracket,
    nth_product,
    normal_product,
    translate,
    vacuum,
    zero,
)
from .polyvector import Polyvector
from .report import Report


@dataclass(frozen=True)
class CurrentSet:
    L: VAElement
    J: VAElement
    Q: VAElement
    G: VAElement
    rank: Fraction
    profile: Profile

    @property
    def ctx(self) -> AlgebraContext:
        return self.L.ctx

    def as_dict(self) -> dict[str, VAElement]:
        return {"L": self.L, "J": self.J, "Q": self.Q, "G": self.G}

    def replace(self, **kw) -> CurrentSet:
        return replace(self, **kw)


def recast(a: VAElement, ctx: AlgebraContext) -> VAElement:
    """The same state written in the canonical order of another profile."""
    out = zero(ctx)
    for mono, c in a.items():
        out = out + VAElement.from_factors(ctx, mono, c)
    return out


def _g(ctx, kind, i, d=0):
    return generator(ctx, kind, i, d)


def omega_currents(D: int) -> CurrentSet:
    ctx = AlgebraContext(D, Profile.DE_RHAM)
    L = J = Q = G = zero(ctx)
    for i in range(1, D + 1):
        L += normal_product(_g(ctx, Kind.X, i, 1), _g(ctx, Kind.Y, i))
        L += normal_product(_g(ctx, Kind.PHI, i, 1), _g(ctx, Kind.PSI, i))
        J += normal_product(_g(ctx, Kind.PHI, i), _g(ctx, Kind.PSI, i))
        Q += normal_product(_g(ctx, Kind.Y, i), _g(ctx, Kind.PHI, i))
        G += normal_product(_g(ctx, Kind.X, i, 1), _g(ctx, Kind.PSI, i))
    return CurrentSet(L, J, Q, G, Fraction(D), Profile.DE_RHAM)


def mirror(cs: CurrentSet) -> CurrentSet:
    """G -> Q, Q -> G, J -> -J, L -> L - dJ, with the profile toggled."""
    target = Profile.POLYVECTOR if cs.profile is Profile.DE_RHAM else Profile.DE_RHAM
    ctx = cs.ctx.with_profile(target)
    return CurrentSet(
        L=recast(cs.L - translate(cs.J), ctx),
        J=recast(-cs.J, ctx),
        Q=recast(cs.G, ctx),
        G=recast(cs.Q, ctx),
        rank=cs.rank,
        profile=target,
    )


def theta_currents(D: int) -> CurrentSet:
    """Chiral polyvector currents from their local formulas.

    The Virasoro vector is ``dx^i y^i - phi^i dpsi^i``: the minus sign is what
    ``L - dJ`` produces for the de Rham currents once the odd factors are put
    in a fixed order.
    """
    ctx = AlgebraContext(D, Profile.POLYVECTOR)
    L = J = Q = G = zero(ctx)
    for i in range(1, D + 1):
        L += normal_product(_g(ctx, Kind.X, i, 1), _g(ctx, Kind.Y, i))
        L -= normal_product(_g(ctx, Kind.PHI, i), _g(ctx, Kind.PSI, i, 1))
        J -= normal_product(_g(ctx, Kind.PHI, i), _g(ctx, Kind.PSI, i))
        G += normal_product(_g(ctx, Kind.Y, i), _g(ctx, Kind.PHI, i))
        Q += normal_product(_g(ctx, Kind.X, i, 1), _g(ctx, Kind.PSI, i))
    cs = CurrentSet(L, J, Q, G, Fraction(D), Profile.POLYVECTOR)
    mirrored = mirror(omega_currents(D))
    if mirrored != cs:
        raise IdentityFailure("polyvector currents differ from the mirrored de Rham currents",
                              {k: v.render() for k, v in mirrored.as_dict().items()})
    return cs


def _bracket_table(a: VAElement, b: VAElement) -> dict:
    return {n: v.render() for n, v in lambda_bracket(a, b).items()}


def verify_top_facts(cs: CurrentSet) -> Report:
    ctx = cs.ctx
    rep = Report(f"topological structure of rank {cs.rank} (D={ctx.D}, {cs.profile.value})")
    omega = vacuum(ctx)
    try:
        c = check_virasoro(cs.L)
        rep.add("virasoro c=0", c == 0, central_charge=str(c))
    except IdentityFailure as exc:
        rep.add("virasoro c=0", False, error=str(exc), **{k: str(v) for k, v in exc.details.items()})
    rep.add("G primary of weight 2", is_primary(cs.G, cs.L, 2), LG=_bracket_table(cs.L, cs.G))
    rep.add("Q primary of weight 1", is_primary(cs.Q, cs.L, 1), LQ=_bracket_table(cs.L, cs.Q))
    jj = lambda_bracket(cs.J, cs.J)
    rep.add("J-J OPE = rank/(z-w)^2", jj == {1: cs.rank * omega} if cs.rank else jj == {},
            JJ=_bracket_table(cs.J, cs.J))
    want = {0: cs.L, 1: cs.J, 2: cs.rank * omega}
    want = {n: v for n, v in want.items() if v}
    rep.add("Q-G OPE = L, J, rank", lambda_bracket(cs.Q, cs.G) == want, QG=_bracket_table(cs.Q, cs.G))
    rep.add("G-G OPE = 0", lambda_bracket(cs.G, cs.G) == {}, GG=_bracket_table(cs.G, cs.G))
    rep.add("Q-Q OPE = 0", lambda_bracket(cs.Q, cs.Q) == {}, QQ=_bracket_table(cs.Q, cs.Q))
    jq = nth_product(cs.J, 0, cs.Q)
    jg = nth_product(cs.J, 0, cs.G)
    rep.add("J-charges Q=+1, G=-1", jq == cs.Q and jg == -cs.G, J0Q=jq.render(), J0G=jg.render())
    rep.values["rank"] = str(cs.rank)
    return rep


def embed_polyvector(p: Polyvector, ctx: AlgebraContext) -> VAElement:
    """Weight-zero state of a polyvector: psi factors by ascending index, then x factors."""
    if ctx.profile is not Profile.POLYVECTOR:
        raise ValueError("polyvectors embed in the polyvector profile only")
    if p.D != ctx.D:
        raise ValueError(f"polyvector on D={p.D} used with context D={ctx.D}")
    from .algebra import Symbol

    out = zero(ctx)
    for (xexp, psis), c in p.items():
        factors = [Symbol(Kind.PSI, i) for i in psis]
        for i, e in enumerate(xexp, 1):
            factors.extend([Symbol(Kind.X, i)] * e)
        out = out + VAElement.from_factors(ctx, factors, c)
    return out


def vector_field_bracket(v: Polyvector, w: Polyvector) -> Polyvector:
    """Lie bracket of vector fields written as ``sum v^j psi^j``."""
    D = v.D
    comps_v = [_component(v, j) for j in range(1, D + 1)]
    comps_w = [_component(w, j) for j in range(1, D + 1)]
    out = Polyvector(D)
    for j in range(1, D + 1):
        c = Polyvector(D)
        for i in range(1, D + 1):
            c = c + comps_v[i - 1] * comps_w[j - 1].d_x(i) - comps_w[i - 1] * comps_v[j - 1].d_x(i)
        out = out + c * Polyvector.psi(D, j)
    return out


def _component(v: Polyvector, j: int) -> Polyvector:
    return Polyvector(v.D, {(x, ()): c for (x, ps), c in v.items() if ps == (j,)})


def chiral_lift(v: Polyvector, cs: CurrentSet) -> VAElement:
    """``G_(0)`` applied to a vector field; checks self-locality of the result."""
    if v and v.psi_degrees() != {1}:
        raise ValueError("chiral lift needs a vector field (psi-degree exactly 1)")
    if cs.profile is not Profile.POLYVECTOR:
        raise ValueError("chiral lift is defined for the polyvector currents")
    lift = nth_product(cs.G, 0, embed_polyvector(v, cs.ctx))
    expected = nth_product(cs.G, 0, embed_polyvector(vector_field_bracket(v, v), cs.ctx))
    got = lambda_bracket(lift, lift)
    want = {0: expected} if expected else {}
    if got != want:
        raise IdentityFailure("chiral lift is not self-local",
                              {f"n={n}": x.render() for n, x in got.items()})
    return lift


def lift_bracket_matches(v: Polyvector, w: Polyvector, cs: CurrentSet) -> bool:
    """Whether ``xi^ch(z) chi^ch(w) ~ [xi, chi]^ch(w)/(z-w)`` holds exactly."""
    ctx = cs.ctx
    a = nth_product(cs.G, 0, embed_polyvector(v, ctx))
    b = nth_product(cs.G, 0, embed_polyvector(w, ctx))
    c = nth_product(cs.G, 0, embed_polyvector(vector_field_bracket(v, w), ctx))
    want = {0: c} if c else {}
    return lambda_bracket(a, b) == want


def fermion_degree_of(a: VAElement) -> Fraction | None:
    return grading(a, Grading.FERMION)
