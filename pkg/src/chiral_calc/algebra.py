"""Exact term engine for the free bc-beta-gamma vertex superalgebra.

States are finite sums of normally ordered monomials in derivatives of the
generators ``x^i, y^i, phi^i, psi^i``.  A factor list ``(a1, ..., ak)`` stands
for the right-nested product ``:a1 :a2 ... :ak Omega:...:``.  Because every
``(-1)``-product of a single generator derivative is a pure creation operator,
the normal form is a supercommutative monomial: factors are kept sorted in a
fixed total order and odd squares vanish.

All n-th products are computed by recursion on normal forms using

* the action of generator modes ``g_(m)``, ``m >= 0``, as super-derivations
  fixed by the pairing table,
* skew-symmetry, to move a single generator to the left,
* the Borcherds commutator formula against ``(-1)``-products (the mode form of
  the non-commutative Wick formula),
* quasi-associativity for ``(-1)``-products of composite states,
* sesquilinearity ``(dA)_(n) = -n A_(n-1)`` for negative modes.

Mode indexing is the field indexing ``A(z) = sum A_(n) z^(-n-1)``; the
Virasoro modes are ``L_n = L_(n+1)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping, Sequence


class Kind(enum.IntEnum):
    X = 0
    Y = 1
    PHI = 2
    PSI = 3


class Profile(enum.Enum):
    DE_RHAM = "de_rham"
    POLYVECTOR = "polyvector"


ODD_KINDS = frozenset({Kind.PHI, Kind.PSI})

INTRINSIC_WEIGHT = {
    Profile.DE_RHAM: {Kind.X: 0, Kind.Y: 1, Kind.PHI: 0, Kind.PSI: 1},
    Profile.POLYVECTOR: {Kind.X: 0, Kind.Y: 1, Kind.PHI: 1, Kind.PSI: 0},
}

# position of a kind among factors of equal conformal weight
_KIND_RANK = {Kind.Y: 0, Kind.PHI: 1, Kind.PSI: 2, Kind.X: 3}

# g_(0) h = PAIRING[g, h] * Omega for equal indices; every other pair vanishes
PAIRING = {
    (Kind.Y, Kind.X): 1,
    (Kind.X, Kind.Y): -1,
    (Kind.PHI, Kind.PSI): 1,
    (Kind.PSI, Kind.PHI): 1,
}

KIND_NAMES = {Kind.X: "x", Kind.Y: "y", Kind.PHI: "phi", Kind.PSI: "psi"}


class ContextMismatch(ValueError):
    pass


class IdentityFailure(AssertionError):
    """An identity that must hold exactly did not.

    ``details`` maps a short label (e.g. ``"n=3"``) to the offending value.
    """

    def __init__(self, message: str, details: Mapping[str, object] | None = None):
        super().__init__(message)
        self.details = dict(details or {})


@dataclass(frozen=True)
class AlgebraContext:
    D: int
    profile: Profile = Profile.POLYVECTOR

    def __post_init__(self):
        if not isinstance(self.D, int) or self.D < 1:
            raise ValueError(f"D must be a positive integer, got {self.D!r}")

    def weight(self, sym: Symbol) -> int:
        return INTRINSIC_WEIGHT[self.profile][sym.kind] + sym.deriv

    def sort_key(self, sym: Symbol):
        return (-self.weight(sym), _KIND_RANK[sym.kind], sym.index, -sym.deriv)

    def with_profile(self, profile: Profile) -> AlgebraContext:
        return AlgebraContext(self.D, profile)


@dataclass(frozen=True, order=True)
class Symbol:
    """``deriv`` applications of the translation operator to a generator."""

    kind: Kind
    index: int
    deriv: int = 0

    @property
    def odd(self) -> bool:
        return self.kind in ODD_KINDS

    def shifted(self, k: int = 1) -> Symbol:
        return Symbol(self.kind, self.index, self.deriv + k)

    def render(self) -> str:
        if self.deriv == 0:
            prefix = ""
        elif self.deriv == 1:
            prefix = "d"
        else:
            prefix = f"d^{self.deriv}"
        return f"{prefix}{KIND_NAMES[self.kind]}{self.index}"


Monomial = tuple  # tuple[Symbol, ...] in canonical order
Terms = dict  # dict[Monomial, Fraction]

VACUUM: Monomial = ()


def _parity(mono: Monomial) -> int:
    return sum(1 for s in mono if s.odd) & 1


def _canon(ctx: AlgebraContext, factors: Sequence[Symbol]) -> tuple[int, Monomial]:
    """Sort factors canonically; return (sign, monomial) with sign 0 for odd squares."""
    keyed = [(ctx.sort_key(s), s) for s in factors]
    sign = 1
    # insertion sort keeps track of odd transpositions
    for i in range(1, len(keyed)):
        j = i
        while j > 0 and keyed[j - 1][0] > keyed[j][0]:
            if keyed[j - 1][1].odd and keyed[j][1].odd:
                sign = -sign
            keyed[j - 1], keyed[j] = keyed[j], keyed[j - 1]
            j -= 1
    mono = tuple(s for _, s in keyed)
    for a, b in zip(mono, mono[1:]):
        if a == b and a.odd:
            return 0, VACUUM
    return sign, mono


def _add_into(target: Terms, source: Mapping[Monomial, Fraction], scale=1) -> None:
    if not scale:
        return
    for mono, c in source.items():
        v = target.get(mono, 0) + c * scale
        if v:
            target[mono] = v
        else:
            target.pop(mono, None)


def _mul_symbol(ctx: AlgebraContext, sym: Symbol, terms: Mapping[Monomial, Fraction]) -> Terms:
    """``sym_(-1)`` applied to ``terms``: supercommutative multiplication."""
    out: Terms = {}
    for mono, c in terms.items():
        sign, new = _canon(ctx, (sym,) + mono)
        if sign:
            _add_into(out, {new: c}, sign)
    return out


def _annihilate(ctx: AlgebraContext, kind: Kind, index: int, mode: int,
                terms: Mapping[Monomial, Fraction]) -> Terms:
    """Generator mode ``g_(mode)`` with ``mode >= 0`` as a super-derivation.

    It removes a factor ``d^mode h`` paired with ``g`` and contributes
    ``mode! * PAIRING[g, h]`` times the Koszul sign.
    """
    out: Terms = {}
    g_odd = kind in ODD_KINDS
    scale = factorial(mode)
    for mono, c in terms.items():
        odd_before = 0
        for pos, s in enumerate(mono):
            if s.index == index and s.deriv == mode:
                pair = PAIRING.get((kind, s.kind))
                if pair:
                    sign = -1 if (g_odd and odd_before & 1) else 1
                    rest = mono[:pos] + mono[pos + 1:]
                    _add_into(out, {rest: c}, sign * pair * scale)
            if s.odd:
                odd_before += 1
    return out


def _translate_terms(ctx: AlgebraContext, terms: Mapping[Monomial, Fraction]) -> Terms:
    out: Terms = {}
    for mono, c in terms.items():
        for pos, s in enumerate(mono):
            sign, new = _canon(ctx, mono[:pos] + (s.shifted(),) + mono[pos + 1:])
            if sign:
                _add_into(out, {new: c}, sign)
    return out


@lru_cache(maxsize=None)
def _translate_power(ctx: AlgebraContext, mono: Monomial, k: int) -> tuple:
    """``d^k mono / k!`` as a frozen term tuple."""
    terms: Terms = {mono: Fraction(1)}
    for _ in range(k):
        terms = _translate_terms(ctx, terms)
    inv = Fraction(1, factorial(k))
    return tuple((m, c * inv) for m, c in terms.items())


def _symbol_mode(ctx: AlgebraContext, sym: Symbol, m: int, terms: Mapping[Monomial, Fraction]) -> Terms:
    """``(d^k g)_(m)`` for ``m >= 0``: equals ``(-1)^k m!/(m-k)! g_(m-k)``."""
    k = sym.deriv
    if m < k:
        return {}
    scale = (-1) ** k * factorial(m) // factorial(m - k)
    res = _annihilate(ctx, sym.kind, sym.index, m - k, terms)
    if scale != 1:
        res = {mono: c * scale for mono, c in res.items()}
    return res


def _max_deriv(mono: Monomial) -> int:
    return max((s.deriv for s in mono), default=-1)


def _weight(ctx: AlgebraContext, mono: Monomial) -> int:
    return sum(ctx.weight(s) for s in mono)


@lru_cache(maxsize=None)
def _product(ctx: AlgebraContext, left: Monomial, n: int, right: Monomial) -> tuple:
    """``left_(n) right`` for canonical monomials with unit coefficients."""
    return tuple(_product_terms(ctx, left, n, right).items())


def _product_terms(ctx: AlgebraContext, left: Monomial, n: int, right: Monomial) -> Terms:
    if not left:
        return {right: Fraction(1)} if n == -1 else {}
    if n <= -2:
        k = -1 - n
        out: Terms = {}
        for mono, c in _translate_power(ctx, left, k):
            _add_into(out, dict(_product(ctx, mono, -1, right)), c)
        return out
    if not right:
        return {left: Fraction(1)} if n == -1 else {}
    if n == -1:
        return _normal_product_terms(ctx, left, right)
    if n >= _weight(ctx, left) + _weight(ctx, right):
        return {}
    if len(left) == 1:
        return _symbol_mode(ctx, left[0], n, {right: Fraction(1)})
    return _bracket_terms(ctx, left, n, right)


def _normal_product_terms(ctx: AlgebraContext, left: Monomial, right: Monomial) -> Terms:
    s, rest = left[0], left[1:]
    if not rest:
        return _mul_symbol(ctx, s, {right: Fraction(1)})
    # quasi-associativity with left = :s rest:
    out = _mul_symbol(ctx, s, dict(_product(ctx, rest, -1, right)))
    for j in range(_weight(ctx, rest) + _weight(ctx, right)):
        inner = dict(_product(ctx, rest, j, right))
        if inner:
            _add_into(out, _mul_symbol(ctx, s.shifted(j + 1), inner), Fraction(1, factorial(j + 1)))
    sign = -1 if (s.odd and _parity(rest)) else 1
    for j in range(ctx.weight(s) + _weight(ctx, right)):
        inner = _symbol_mode(ctx, s, j, {right: Fraction(1)})
        if not inner:
            continue
        for tmono, tc in _translate_power(ctx, rest, j + 1):
            for imono, ic in inner.items():
                _add_into(out, dict(_product(ctx, tmono, -1, imono)), sign * tc * ic)
    return out


def _generator_bracket(ctx: AlgebraContext, left: Monomial, j: int, b: Symbol) -> Terms:
    """``left_(j) b`` for a single generator symbol ``b`` via skew-symmetry."""
    p = -1 if (b.odd and _parity(left)) else 1
    out: Terms = {}
    top = _max_deriv(left) + b.deriv
    for i in range(0, top - j + 1):
        acted = _symbol_mode(ctx, b, j + i, {left: Fraction(1)})
        if not acted:
            continue
        scale = -p * (-1) ** (j + i)
        for mono, c in acted.items():
            _add_into(out, dict(_translate_power(ctx, mono, i)), scale * c)
    return out


def _bracket_terms(ctx: AlgebraContext, left: Monomial, n: int, right: Monomial) -> Terms:
    b, rest = right[0], right[1:]
    # left_(n) :b rest: = p b_(-1)(left_(n) rest) + sum_j C(n,j) (left_(j) b)_(n-1-j) rest
    p = -1 if (b.odd and _parity(left)) else 1
    out: Terms = {}
    if rest:
        _add_into(out, _mul_symbol(ctx, b, dict(_product(ctx, left, n, rest))), p)
    for j in range(n + 1):
        lb = _generator_bracket(ctx, left, j, b)
        for mono, c in lb.items():
            _add_into(out, dict(_product(ctx, mono, n - 1 - j, rest)), comb(n, j) * c)
    return out


class VAElement:
    """A finite formal sum of normally ordered monomials; immutable."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: AlgebraContext, terms: Mapping[Monomial, Fraction] | None = None):
        self.ctx = ctx
        self._terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def from_factors(cls, ctx: AlgebraContext, factors: Iterable[Symbol], coeff=1) -> VAElement:
        sign, mono = _canon(ctx, tuple(factors))
        return cls(ctx, {mono: Fraction(coeff) * sign} if sign else {})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, ``None`` when mixed (zero is even)."""
        ps = {_parity(m) for m in self._terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def _check(self, other: VAElement):
        if not isinstance(other, VAElement):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        _add_into(out, other._terms)
        return VAElement(self.ctx, out)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        _add_into(out, other._terms, -1)
        return VAElement(self.ctx, out)

    def __neg__(self):
        return VAElement(self.ctx, {m: -c for m, c in self._terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, VAElement):
            return NotImplemented
        s = Fraction(scalar)
        return VAElement(self.ctx, {m: c * s for m, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        if not isinstance(other, VAElement):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda mc: (
            -_weight(self.ctx, mc[0]), len(mc[0]), [self.ctx.sort_key(s) for s in mc[0]]))

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            body = ":" + " ".join(s.render() for s in mono) + ":" if mono else ""
            mag = abs(c)
            if not mono:
                coeff = str(mag)
            elif mag == 1:
                coeff = ""
            else:
                coeff = f"{mag} "
            sign = "-" if c < 0 else "+"
            parts.append((sign, coeff + body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, chunk in parts[1:]:
            text += f" {sign} {chunk}"
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"VAElement({self.render()!r})"


# ---------------------------------------------------------------- operations


def vacuum(ctx: AlgebraContext) -> VAElement:
    return VAElement(ctx, {VACUUM: Fraction(1)})


def zero(ctx: AlgebraContext) -> VAElement:
    return VAElement(ctx)


def generator(ctx: AlgebraContext, kind: Kind, index: int, deriv_order: int = 0) -> VAElement:
    if not 1 <= index <= ctx.D:
        raise IndexError(f"generator index {index} outside 1..{ctx.D}")
    if deriv_order < 0:
        raise ValueError("deriv_order must be nonnegative")
    return VAElement(ctx, {(Symbol(Kind(kind), index, deriv_order),): Fraction(1)})


def translate(a: VAElement, times: int = 1) -> VAElement:
    terms = a.terms
    for _ in range(times):
        terms = _translate_terms(a.ctx, terms)
    return VAElement(a.ctx, terms)


def nth_product(a: VAElement, n: int, b: VAElement) -> VAElement:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")
    ctx = a.ctx
    out: Terms = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _add_into(out, dict(_product(ctx, ma, n, mb)), ca * cb)
    return VAElement(ctx, out)


def normal_product(a: VAElement, b: VAElement) -> VAElement:
    return nth_product(a, -1, b)


def max_weight(a: VAElement) -> int:
    return max((_weight(a.ctx, m) for m in a._terms), default=0)


def lambda_bracket(a: VAElement, b: VAElement) -> dict[int, VAElement]:
    """All nonzero ``a_(n) b`` with ``n >= 0``, keyed by ``n``."""
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")
    out = {}
    for n in range(max_weight(a) + max_weight(b)):
        v = nth_product(a, n, b)
        if v:
            out[n] = v
    return out


def super_sign(a: VAElement, b: VAElement) -> int:
    pa, pb = a.parity, b.parity
    if pa is None or pb is None:
        raise ValueError("super sign needs homogeneous parity")
    return -1 if pa and pb else 1


def mode_commutator(a: VAElement, m: int, b: VAElement, n: int, c: VAElement) -> VAElement:
    """``[a_(m), b_(n)] c`` by direct composition and by the Borcherds expansion.

    Raises ``IdentityFailure`` if the two routes disagree.
    """
    direct = nth_product(a, m, nth_product(b, n, c)) - super_sign(a, b) * nth_product(b, n, nth_product(a, m, c))
    expanded = zero(a.ctx)
    for k in range(max_weight(a) + max_weight(b)):
        ab = nth_product(a, k, b)
        if ab:
            expanded = expanded + _gbinom(m, k) * nth_product(ab, m + n - k, c)
    if direct != expanded:
        raise IdentityFailure(
            f"Borcherds commutator mismatch for modes ({m}, {n})",
            {"direct": direct.render(), "borcherds": expanded.render()},
        )
    return direct


def _gbinom(m: int, k: int) -> Fraction:
    num = 1
    for i in range(k):
        num *= m - i
    return Fraction(num, factorial(k))


def conformal_weight(ctx: AlgebraContext, mono: Monomial) -> int:
    return _weight(ctx, mono)


def fermion_degree(ctx: AlgebraContext, mono: Monomial) -> int:
    """J-charge of a monomial: psi +1 and phi -1 for polyvectors, reversed for de Rham."""
    psi = sum(1 for s in mono if s.kind == Kind.PSI)
    phi = sum(1 for s in mono if s.kind == Kind.PHI)
    return psi - phi if ctx.profile is Profile.POLYVECTOR else phi - psi


_EQUIV_SIGN = {Kind.X: 1, Kind.Y: -1, Kind.PHI: 1, Kind.PSI: -1}


def equivariant_weight(mono: Monomial, weights: Sequence[int]) -> int:
    return sum(_EQUIV_SIGN[s.kind] * weights[s.index - 1] for s in mono)


class Grading(enum.Enum):
    CONFORMAL = "conformal"
    FERMION = "fermion"
    EQUIVARIANT = "equivariant"


def grading(a: VAElement, kind: Grading, weights: Sequence[int] | None = None) -> Fraction | None:
    """Common eigenvalue of all terms, or ``None`` when inhomogeneous or zero."""
    if kind is Grading.CONFORMAL:
        vals = {conformal_weight(a.ctx, m) for m in a._terms}
    elif kind is Grading.FERMION:
        vals = {fermion_degree(a.ctx, m) for m in a._terms}
    else:
        if weights is None or len(weights) != a.ctx.D:
            raise ValueError("equivariant grading needs one weight per coordinate")
        vals = {equivariant_weight(m, weights) for m in a._terms}
    if len(vals) != 1:
        return None
    return Fraction(vals.pop())


def all_generators(ctx: AlgebraContext, max_deriv: int = 0) -> list[VAElement]:
    return [generator(ctx, k, i, d) for k in Kind for i in range(1, ctx.D + 1)
            for d in range(max_deriv + 1)]


def check_virasoro(L: VAElement) -> Fraction:
    """Verify the Virasoro OPE of ``L`` and return its central charge.

    Also checks ``L_(0) = d`` on generators and that ``L_(1)`` is diagonal,
    with eigenvalue the conformal weight, on generators and their pairwise
    products.  Raises ``IdentityFailure`` naming the first offending mode.
    """
    ctx = L.ctx
    if L.parity != 0:
        raise IdentityFailure("L is not even", {"L": L.render()})
    if grading(L, Grading.CONFORMAL) != 2:
        raise IdentityFailure("L is not homogeneous of conformal weight 2", {"L": L.render()})
    bracket = {n: nth_product(L, n, L) for n in range(5)}
    expected = {0: translate(L), 1: 2 * L, 2: zero(ctx), 4: zero(ctx)}
    for n, want in expected.items():
        if bracket[n] != want:
            raise IdentityFailure(f"L_({n})L mismatch", {f"n={n}": bracket[n].render(), "expected": want.render()})
    third = bracket[3]
    if third.is_zero():
        c = Fraction(0)
    elif set(third._terms) == {VACUUM}:
        c = 2 * third.coefficient(VACUUM)
    else:
        raise IdentityFailure("L_(3)L is not a multiple of the vacuum", {"n=3": third.render()})
    gens = all_generators(ctx, 1)
    for g in gens:
        if nth_product(L, 0, g) != translate(g):
            raise IdentityFailure("L_(0) differs from translation", {"state": g.render()})
    basis = gens + [normal_product(g, h) for i, g in enumerate(gens) for h in gens[i:]]
    for state in basis:
        if not state:
            continue
        w = grading(state, Grading.CONFORMAL)
        if nth_product(L, 1, state) != w * state:
            raise IdentityFailure("L_(1) not diagonal", {"state": state.render()})
    return c


def is_primary(a: VAElement, L: VAElement, w) -> bool:
    got = lambda_bracket(L, a)
    want = {0: translate(a), 1: Fraction(w) * a}
    want = {n: v for n, v in want.items() if v}
    return got == want
