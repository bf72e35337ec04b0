"""Mode-by-mode Fock space evaluation of n-th products.

This is an independent route to the same products as ``algebra.nth_product``:
the field of a monomial state is expanded into generator modes with the
free-field (creation left, annihilation right) normal ordering, and applied
term by term to the Fock state.  No quasi-associativity or skew-symmetry is
used, so agreement between the two routes is a genuine check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import factorial

from .algebra import (
    VACUUM,
    AlgebraContext,
    ContextMismatch,
    Symbol,
    VAElement,
    _add_into,
    _annihilate,
    _mul_symbol,
)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _field_mode_on(ctx: AlgebraContext, field: tuple, n: int, state: tuple) -> dict:
    if not field:
        return {state: Fraction(1)} if n == -1 else {}
    k = len(field)
    top_mode = max((s.deriv for s in state), default=-1)
    out: dict = {}
    for r in range(k + 1):
        for ann in combinations(range(k), r):
            cre = [i for i in range(k) if i not in ann]
            # sign from moving annihilators right of creators
            sign = 1
            for i in ann:
                if field[i].odd:
                    for j in cre:
                        if j > i and field[j].odd:
                            sign = -sign
            for modes in product(range(top_mode + 1), repeat=r):
                excess = sum(m + field[i].deriv + 1 for i, m in zip(ann, modes)) - (n + 1)
                if excess < 0:
                    continue
                coeff = Fraction(sign)
                terms = {state: Fraction(1)}
                for i, m in reversed(list(zip(ann, modes))):
                    sym = field[i]
                    coeff *= (-1) ** sym.deriv * Fraction(factorial(m + sym.deriv), factorial(m))
                    terms = _annihilate(ctx, sym.kind, sym.index, m, terms)
                    if not terms:
                        break
                if not terms:
                    continue
                for extra in _compositions(excess, len(cre)):
                    acc = terms
                    c2 = coeff
                    for i, e in reversed(list(zip(cre, extra))):
                        acc = _mul_symbol(ctx, field[i].shifted(e), acc)
                        c2 /= factorial(e)
                        if not acc:
                            break
                    if acc:
                        _add_into(out, acc, c2)
    return out


def fock_product(a: VAElement, n: int, b: VAElement) -> VAElement:
    """``a_(n) b`` computed from the mode expansion of the field ``a(z)``."""
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _add_into(out, _field_mode_on(a.ctx, ma, n, mb), ca * cb)
    return VAElement(a.ctx, out)


__all__ = ["fock_product", "VACUUM", "Symbol"]
