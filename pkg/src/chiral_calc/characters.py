"""Truncated q-series with coefficients in Q(u, t), theta products and characters.

``u`` stands for ``z^(1/a)``, so every z-power that occurs is an integer power
of ``u``.  ``t`` is the equivariant variable; setting ``t = u`` recovers the
u-series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.fields import field

from .brst import BrstComplex
from .cohomology import SliceComplex, _sgn
from .report import Report

K, U, T = field("u,t", QQ)


class ThetaPole(ZeroDivisionError):
    pass


def monomial(k: int = 0, l: int = 0):
    """``u^k t^l`` as an element of the coefficient field."""
    return U ** k * T ** l


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def laurent_terms(c) -> dict | None:
    """``{(k, l): Fraction}`` when ``c`` is a Laurent polynomial, else None."""
    den = c.denom.terms()
    if len(den) != 1:
        return None
    (dexp, dc), = den
    out = {}
    for (eu, et), nc in c.numer.terms():
        out[(eu - dexp[0], et - dexp[1])] = _frac(nc) / _frac(dc)
    return out


def _poly_at_t_equals_u(p):
    acc = K.zero
    for (eu, et), c in p.terms():
        acc += K(_frac(c).numerator) / _frac(c).denominator * U ** (eu + et)
    return acc


class QSeries:
    """Power series in q through order ``N``."""

    def __init__(self, a: int, N: int, coeffs: Sequence | None = None):
        if N < 0:
            raise ValueError("truncation order must be nonnegative")
        self.a = a
        self.N = N
        cs = [K(c) for c in (coeffs or [])][: N + 1]
        self.coeffs = cs + [K.zero] * (N + 1 - len(cs))

    @classmethod
    def constant(cls, a: int, N: int, c=1) -> QSeries:
        return cls(a, N, [K(c)])

    def _check(self, other: QSeries):
        if self.a != other.a:
            raise ValueError(f"series in u = z^(1/{self.a}) and u = z^(1/{other.a}) do not mix")

    def _lift(self, other):
        if isinstance(other, QSeries):
            self._check(other)
            return other
        return QSeries.constant(self.a, self.N, other)

    def __add__(self, other):
        other = self._lift(other)
        N = min(self.N, other.N)
        return QSeries(self.a, N, [self.coeffs[i] + other.coeffs[i] for i in range(N + 1)])

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.a, self.N, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries(self.a, self.N, [c * K(other) for c in self.coeffs])
        self._check(other)
        N = min(self.N, other.N)
        out = [K.zero] * (N + 1)
        for i in range(N + 1):
            if not self.coeffs[i]:
                continue
            for j in range(N + 1 - i):
                out[i + j] += self.coeffs[i] * other.coeffs[j]
        return QSeries(self.a, N, out)

    __rmul__ = __mul__

    def inverse(self) -> QSeries:
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("series with vanishing constant term is not invertible")
        inv = [K.zero] * (self.N + 1)
        inv[0] = 1 / c0
        for n in range(1, self.N + 1):
            acc = K.zero
            for k in range(1, n + 1):
                acc += self.coeffs[k] * inv[n - k]
            inv[n] = -acc * inv[0]
        return QSeries(self.a, self.N, inv)

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return self * (1 / K(other))
        return self * other.inverse()

    def truncate(self, N: int) -> QSeries:
        if N > self.N:
            raise ValueError(f"cannot extend a series known through q^{self.N} to q^{N}")
        return QSeries(self.a, N, self.coeffs[: N + 1])

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(self.a, self.N, other)
        if self.a != other.a:
            return False
        N = min(self.N, other.N)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(N + 1))

    def __hash__(self):
        return hash((self.a, tuple(str(c) for c in self.coeffs)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def has_t(self) -> bool:
        return any(c.numer.degree(1) > 0 or c.denom.degree(1) > 0 for c in self.coeffs if c)

    @property
    def denominator_free(self) -> bool:
        return all(laurent_terms(c) is not None for c in self.coeffs)

    def coefficient(self, n: int, k: int = 0, l: int = 0) -> Fraction:
        terms = laurent_terms(self.coeffs[n])
        if terms is None:
            raise ValueError(f"coefficient of q^{n} is not a Laurent polynomial")
        return terms.get((k, l), Fraction(0))

    def to_dict(self) -> dict:
        terms = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            lt = laurent_terms(c)
            if lt is not None:
                coeff = [{"u": k, "t": l, "c": str(v)} for (k, l), v in sorted(lt.items())]
                terms.append({"q": n, "coeff": coeff})
            else:
                terms.append({"q": n, "numer": str(c.numer.as_expr()), "denom": str(c.denom.as_expr())})
        return {"a": self.a, "N": self.N, "denominator_free": self.denominator_free, "terms": terms}

    def render(self) -> str:
        lines = []
        for n, c in enumerate(self.coeffs):
            if c:
                lines.append(f"q^{n}: {c.as_expr()}")
        return "\n".join(lines) if lines else "0"

    def __repr__(self):
        return f"QSeries(a={self.a}, N={self.N}, {self.render()!r})"


def theta_at(w, a: int, N: int) -> QSeries:
    """``theta(w; q)`` through ``q^N`` for a field element ``w``."""
    w = K(w)
    if not w:
        raise ZeroDivisionError("theta needs a nonzero argument")
    one = QSeries.constant(a, N)

    def factor(i, c):
        return one - QSeries(a, N, [K.zero] * i + [c])

    out = one
    for i in range(N + 1):
        out = out * factor(i, w)
        if i >= 1:
            out = out * factor(i, 1 / w) * factor(i, K.one)
    return out


def _u_power(r, a: int) -> int:
    r = Fraction(r) * a
    if r.denominator != 1:
        raise ValueError(f"z^{Fraction(r) / a} is not an integer power of u = z^(1/{a})")
    return int(r)


def theta(r, N: int, a: int = 1) -> QSeries:
    """``theta(z^r; q)`` in ``u = z^(1/a)``; ``r = 0`` gives the zero series."""
    k = _u_power(r, a)
    if k == 0:
        return QSeries(a, N)
    return theta_at(U ** k, a, N)


def theta_quotient(alphas: Iterable, N: int, a: int = 1) -> QSeries:
    """``prod_i theta(z^(1 + alpha_i)) / theta(z^alpha_i)``."""
    out = QSeries.constant(a, N)
    for alpha in alphas:
        alpha = Fraction(alpha)
        if alpha == 0:
            raise ThetaPole("pole of Theta at alpha=0: theta(z^0) vanishes identically")
        out = out * theta(1 + alpha, N, a) / theta(alpha, N, a)
    return out


@dataclass(frozen=True)
class FixedPointDatum:
    """Fixed point ``y``: weights on ``T_y Y`` and the weight of the fibre coordinate.

    ``literal_w_tot`` is the sum of the tangent weights over ``a``; ``w_tot``
    is the fibre coordinate weight over ``a``, which is the value that
    reproduces direct enumeration.
    """

    tangent: tuple
    a: int
    fibre: int | None = None
    label: str = "y"

    def __post_init__(self):
        object.__setattr__(self, "tangent", tuple(int(w) for w in self.tangent))
        if self.a < 1:
            raise ValueError("a must be a positive integer")

    @property
    def literal_w_tot(self) -> Fraction:
        return Fraction(sum(self.tangent), self.a)

    @property
    def w_tot(self) -> Fraction:
        if self.fibre is None:
            raise ValueError(f"fixed point {self.label} has no fibre weight")
        return Fraction(self.fibre, self.a)

    def prefactor(self):
        """Monomial normalization ``prod (-u^tau_i) * (-u^(-a w_tot))``."""
        p = K.one
        for tau in self.tangent:
            p *= -U ** tau
        return p * -U ** (-int(self.w_tot * self.a))


def origin_fixed_point(weights: Sequence[int], a: int) -> FixedPointDatum:
    """The origin of weighted affine space: the last coordinate is the fibre."""
    weights = tuple(weights)
    return FixedPointDatum(tuple(-w for w in weights[:-1]), a, weights[-1], label="0")


def localization_character(points: Sequence[FixedPointDatum], N: int, literal: bool = False) -> QSeries:
    """Sum over fixed points of ``Theta{tangent/a} Theta{-w_tot}``.

    By default each summand carries the monomial prefactor and uses the
    fibre-weight ``w_tot``; ``literal=True`` uses the bare displayed sum with
    ``w_tot`` computed from the tangent weights alone.
    """
    if not points:
        raise ValueError("no fixed points given")
    a = points[0].a
    total = QSeries(a, N)
    for y in points:
        if y.a != a:
            raise ValueError("fixed points disagree on a")
        alphas = [Fraction(tau, a) for tau in y.tangent]
        w_tot = y.literal_w_tot if literal else y.w_tot
        try:
            term = theta_quotient(alphas + [-w_tot], N, a)
        except ThetaPole as exc:
            raise ThetaPole(f"fixed point {y.label}: {exc}") from None
        total = total + (term if literal else term * y.prefactor())
    return total


def pre_substitution_character(points: Sequence[FixedPointDatum], N: int) -> QSeries:
    """The t-dependent form ``theta(z t^tau)/theta(t^tau)`` per direction, with ``z = u^a``.

    The fibre direction enters with ``t^(-a w_tot)``.  Setting ``t = u``
    gives :func:`localization_character`.
    """
    a = points[0].a
    z = U ** a
    total = QSeries(a, N)
    for y in points:
        term = QSeries.constant(a, N, y.prefactor())
        for k in list(y.tangent) + [-int(y.w_tot * a)]:
            if k == 0:
                raise ThetaPole(f"fixed point {y.label}: pole of Theta at alpha=0")
            term = term * theta_at(z * T ** k, a, N) / theta_at(T ** k, a, N)
        total = total + term
    return total


def substitute_t(s: QSeries) -> QSeries:
    """``t -> u``, i.e. ``t = z^(1/a)``."""
    return QSeries(s.a, s.N, [_poly_at_t_equals_u(c.numer) / _poly_at_t_equals_u(c.denom)
                              for c in s.coeffs])


@dataclass
class DirectCharacter:
    series: QSeries  # refined: q^n (-1)^j u^(a j) t^m
    sufficient: bool
    boundary: list
    c_window: tuple

    def collapsed(self) -> QSeries:
        return substitute_t(self.series)


def direct_character(bc: BrstComplex, N: int, c_window: tuple | None = None,
                     complex_: SliceComplex | None = None) -> DirectCharacter:
    """Signed cohomology dimensions ``sum (-1)^j dim H q^n u^(a j) t^m``.

    Slices are gathered along lines of constant charge ``c = a j + m`` in
    ``c_window``.  If a boundary line carries a nonzero term the window may be
    cutting off the series and ``sufficient`` is False.
    """
    sc = complex_ or SliceComplex(bc)
    a = sc.a
    if c_window is None:
        c_window = (-a * (N + 1), a * (N + 1))
    lo, hi = c_window
    coeffs = [K.zero] * (N + 1)
    boundary = []
    for n in range(N + 1):
        for c in range(lo, hi + 1):
            line = K.zero
            for j in sc.j_range(n):
                m = c - a * j
                if not sc.basis(n, m, j):
                    continue
                d = sc.cohomology_dim(n, m, j)
                if d:
                    line += _sgn(j) * d * U ** (a * j) * T ** m
            if line and c in (lo, hi):
                boundary.append((n, c))
            coeffs[n] += line
    return DirectCharacter(QSeries(a, N, coeffs), not boundary, boundary, (lo, hi))


def chain_character(sc: SliceComplex, N: int, c_window: tuple) -> QSeries:
    """Signed slice dimensions of the underlying free-field space, in ``u``."""
    coeffs = [K.zero] * (N + 1)
    for n in range(N + 1):
        for c in range(c_window[0], c_window[1] + 1):
            total = sum(_sgn(j) * len(sc.basis(n, c - sc.a * j, j)) for j in sc.j_range(n))
            if total:
                coeffs[n] += total * U ** c
    return QSeries(sc.a, N, coeffs)


def free_field_character(weights: Sequence[int], a: int, N: int) -> QSeries:
    """Closed-form product over the four generator families, in ``u``.

    A coordinate of weight ``w`` contributes ``x`` (``u^w``), ``psi``
    (``-u^(a-w)``), ``y`` (``u^-w``) and ``phi`` (``-u^(w-a)``), the last two
    starting at ``q^1``.
    """
    out = QSeries.constant(a, N)
    one = QSeries.constant(a, N)
    for w in weights:
        for k in range(N + 1):
            qk = lambda c: QSeries(a, N, [K.zero] * k + [c])
            out = out * (one - qk(U ** (a - w))) / (one - qk(U ** w))
            if k >= 1:
                out = out * (one - qk(U ** (w - a))) / (one - qk(U ** (-w)))
    return out


def compare_characters(bc: BrstComplex, N: int = 4, c_window: tuple | None = None) -> Report:
    """Localization against direct enumeration, with the fibre-weight convention spelled out."""
    pot = bc.potential
    rep = Report(f"character of f = {pot.label()} through q^{N}")
    direct = direct_character(bc, N, c_window)
    rep.add("direct window sufficient", direct.sufficient, boundary=[str(b) for b in direct.boundary])
    collapsed = direct.collapsed()
    point = origin_fixed_point(pot.weights, pot.a)
    pre = pre_substitution_character([point], N)
    loc = localization_character([point], N)
    rep.add("t = u substitution of the pre-substitution form = localization", substitute_t(pre) == loc)
    rep.add("localization = direct", loc == collapsed)
    rep.values["convention"] = (
        f"w_tot = fibre weight / a = {point.w_tot}; each fixed point carries the prefactor "
        f"{point.prefactor().as_expr()}; direct terms are (-1)^j u^(a j) t^m with t = u")
    try:
        literal = localization_character([point], N, literal=True)
        ratio = [str((collapsed.coeffs[i] / literal.coeffs[i]).as_expr()) if literal.coeffs[i] else "inf"
                 for i in range(N + 1)]
        rep.values["literal formula discrepancy"] = {"literal": literal.to_dict(), "direct/literal": ratio}
    except ThetaPole as exc:
        rep.values["literal formula discrepancy"] = (
            f"literal w_tot = {point.literal_w_tot} gives {exc}")
    rep.values["direct"] = collapsed.to_dict()
    rep.values["localization"] = loc.to_dict()
    return rep
