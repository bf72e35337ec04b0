"""Polyvectors on affine space: polynomials in commuting ``x^i`` and odd ``psi^i``.

A term is keyed by ``(xexp, psis)`` where ``xexp`` is a tuple of exponents and
``psis`` an ascending tuple of indices.  This is a self-contained
supercommutative calculus, used both to build chiral states and as the
classical oracle for the weight-zero identities.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping


def _merge_psis(a: tuple, b: tuple) -> tuple[int, tuple]:
    if set(a) & set(b):
        return 0, ()
    seq = list(a + b)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


class Polyvector:
    __slots__ = ("D", "_terms")

    def __init__(self, D: int, terms: Mapping | None = None):
        self.D = D
        self._terms = {}
        for (xexp, psis), c in (terms or {}).items():
            if c:
                self._terms[(tuple(xexp), tuple(psis))] = Fraction(c)

    @classmethod
    def monomial(cls, D: int, xexp=None, psis=(), coeff=1) -> Polyvector:
        xexp = tuple(xexp) if xexp is not None else (0,) * D
        # ordering a given psi word picks up its Koszul sign
        sign, ordered = _merge_psis((), tuple(psis))
        if len(set(psis)) != len(psis):
            return cls(D)
        return cls(D, {(xexp, ordered): Fraction(coeff) * sign})

    @classmethod
    def x(cls, D: int, i: int) -> Polyvector:
        e = [0] * D
        e[i - 1] = 1
        return cls.monomial(D, e)

    @classmethod
    def psi(cls, D: int, i: int) -> Polyvector:
        return cls.monomial(D, None, (i,))

    @classmethod
    def const(cls, D: int, c) -> Polyvector:
        return cls.monomial(D, None, (), c)

    def items(self):
        return self._terms.items()

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        return isinstance(other, Polyvector) and self.D == other.D and self._terms == other._terms

    def __hash__(self):
        return hash((self.D, frozenset(self._terms.items())))

    def __add__(self, other: Polyvector) -> Polyvector:
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Polyvector(self.D, out)

    def __neg__(self):
        return Polyvector(self.D, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Polyvector) -> Polyvector:
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polyvector):
            s = Fraction(other)
            return Polyvector(self.D, {k: c * s for k, c in self._terms.items()})
        out: dict = {}
        for (xa, pa), ca in self._terms.items():
            for (xb, pb), cb in other._terms.items():
                sign, ps = _merge_psis(pa, pb)
                if not sign:
                    continue
                key = (tuple(i + j for i, j in zip(xa, xb)), ps)
                out[key] = out.get(key, 0) + sign * ca * cb
        return Polyvector(self.D, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polyvector:
        out = Polyvector.const(self.D, 1)
        for _ in range(k):
            out = out * self
        return out

    def psi_degrees(self) -> set[int]:
        return {len(p) for _, p in self._terms}

    def d_x(self, i: int) -> Polyvector:
        out = {}
        for (xexp, ps), c in self._terms.items():
            e = xexp[i - 1]
            if e:
                nx = list(xexp)
                nx[i - 1] -= 1
                out[(tuple(nx), ps)] = c * e
        return Polyvector(self.D, out)

    def d_psi(self, i: int) -> Polyvector:
        """Left derivative in ``psi^i``."""
        out = {}
        for (xexp, ps), c in self._terms.items():
            if i in ps:
                pos = ps.index(i)
                out[(xexp, ps[:pos] + ps[pos + 1:])] = c * (-1) ** pos
        return Polyvector(self.D, out)

    def weight(self, weights) -> set[int]:
        return {sum(w * e for w, e in zip(weights, xexp)) - sum(weights[i - 1] for i in ps)
                for xexp, ps in self._terms}

    def render(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for (xexp, ps), c in sorted(self._terms.items()):
            factors = [f"psi{i}" for i in ps]
            for i, e in enumerate(xexp, 1):
                if e == 1:
                    factors.append(f"x{i}")
                elif e:
                    factors.append(f"x{i}^{e}")
            body = "*".join(factors)
            if not body:
                chunks.append(str(c))
            elif c == 1:
                chunks.append(body)
            elif c == -1:
                chunks.append("-" + body)
            else:
                chunks.append(f"{c}*{body}")
        return " + ".join(chunks).replace("+ -", "- ")

    def __repr__(self):
        return f"Polyvector({self.render()!r})"


def schouten_with_function(f: Polyvector, p: Polyvector) -> Polyvector:
    """``{f, p} = sum_j d_j f * d p / d psi^j`` for a function ``f``."""
    out = Polyvector(p.D)
    for j in range(1, p.D + 1):
        out = out + f.d_x(j) * p.d_psi(j)
    return out


def divergence(p: Polyvector) -> Polyvector:
    """``sum_i d/dx^i d/dpsi^i`` for the standard volume form."""
    out = Polyvector(p.D)
    for i in range(1, p.D + 1):
        out = out + p.d_psi(i).d_x(i)
    return out


def random_polyvector(D: int, rng: random.Random, max_psi: int = 2, max_xdeg: int = 3,
                      terms: int = 3) -> Polyvector:
    out = Polyvector(D)
    for _ in range(terms):
        xexp = [rng.randint(0, max_xdeg) for _ in range(D)]
        k = rng.randint(0, min(max_psi, D))
        psis = rng.sample(range(1, D + 1), k)
        out = out + Polyvector.monomial(D, xexp, psis, rng.randint(-3, 3))
    return out
