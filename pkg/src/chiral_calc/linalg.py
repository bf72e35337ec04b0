"""Exact rational linear algebra on sparse rows (dict column -> Fraction)."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


def _size(c: Fraction) -> int:
    return c.numerator.bit_length() + c.denominator.bit_length()


def rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    """Rank of the matrix whose nonzero rows are given as sparse dicts.

    Gaussian elimination; among candidate pivots in a column the entry with
    the smallest numerator+denominator bit length is used.
    """
    work = [dict(r) for r in rows if r]
    r = 0
    while work:
        col = min(min(row) for row in work)
        candidates = [i for i, row in enumerate(work) if col in row]
        p = min(candidates, key=lambda i: (_size(work[i][col]), len(work[i])))
        pivot = work.pop(p)
        pv = pivot[col]
        r += 1
        rest = []
        for row in work:
            c = row.get(col)
            if c is not None:
                f = c / pv
                for k, v in pivot.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            if row:
                rest.append(row)
        work = rest
    return r


def compose(first: list[Mapping[int, Fraction]], second: list[Mapping[int, Fraction]]) -> list[dict]:
    """Rows of ``second . first`` where row i of ``first`` is the image of basis vector i."""
    out = []
    for row in first:
        acc: dict = {}
        for k, v in row.items():
            for k2, v2 in second[k].items():
                nv = acc.get(k2, 0) + v * v2
                if nv:
                    acc[k2] = nv
                else:
                    acc.pop(k2, None)
        out.append(acc)
    return out


def is_zero(rows: Iterable[Mapping[int, Fraction]]) -> bool:
    return all(not r for r in rows)
