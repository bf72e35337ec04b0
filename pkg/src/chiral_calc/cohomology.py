"""Finite tri-graded slices of the chiral critical locus and their cohomology.

A slice is the span of monomials of conformal weight ``n`` and equivariant
weight ``m``, bucketed by fermion degree ``j``.  The differential maps the
``(n, m, j)`` bucket to ``(n, m + a, j - 1)``, so cohomology at a key uses the
buckets on either side.  The combination ``a*j + m`` (``a`` times the twisted
J-charge) is preserved by the differential; Euler characteristics are taken
along lines of constant charge.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .algebra import (
    AlgebraContext,
    Kind,
    Symbol,
    VAElement,
    _canon,
    equivariant_weight,
    fermion_degree,
    nth_product,
)
from .brst import BrstComplex, Potential
from .linalg import compose, is_zero, rank
from .polyvector import Polyvector, divergence, schouten_with_function
from .report import Report


class InfiniteSlice(ValueError):
    pass


def _sgn(j: int) -> int:
    return -1 if j % 2 else 1


@dataclass(frozen=True, order=True)
class GradingKey:
    n: int
    m: int
    j: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("conformal weight must be nonnegative")


@dataclass
class Slice:
    n: int
    m: int
    buckets: dict  # j -> list of monomials

    def basis(self, j: int) -> list:
        return self.buckets.get(j, [])

    def dims(self) -> dict:
        return {j: len(b) for j, b in sorted(self.buckets.items())}

    def __len__(self):
        return sum(len(b) for b in self.buckets.values())


def _heavy_symbols(ctx: AlgebraContext, n: int) -> list[Symbol]:
    out = []
    for i in range(1, ctx.D + 1):
        for k in range(1, n + 1):
            out.append(Symbol(Kind.X, i, k))
            out.append(Symbol(Kind.PSI, i, k))
        for k in range(0, n):
            out.append(Symbol(Kind.Y, i, k))
            out.append(Symbol(Kind.PHI, i, k))
    return out


def _heavy_multisets(ctx: AlgebraContext, syms: list[Symbol], n: int, start: int = 0):
    if n == 0:
        yield ()
        return
    for idx in range(start, len(syms)):
        s = syms[idx]
        w = ctx.weight(s)
        if w > n:
            continue
        # odd symbols at most once: move past them
        nxt = idx + 1 if s.odd else idx
        for rest in _heavy_multisets(ctx, syms, n - w, nxt):
            yield (s,) + rest


def _x_exponents(weights, target: int, i: int = 0):
    if i == len(weights):
        if target == 0:
            yield ()
        return
    w = weights[i]
    for e in range(target // w + 1):
        for rest in _x_exponents(weights, target - e * w, i + 1):
            yield (e,) + rest


def enumerate_slice(ctx: AlgebraContext, weights, n: int, m: int) -> Slice:
    """All monomials of conformal weight ``n`` and equivariant weight ``m``."""
    weights = tuple(weights)
    if any(w <= 0 for w in weights):
        raise InfiniteSlice(
            "slices need strictly positive coordinate weights: with a weight <= 0, "
            "powers of that coordinate do not raise the equivariant weight and the slice is infinite")
    buckets: dict = {}
    heavy = _heavy_symbols(ctx, n)
    for hv in _heavy_multisets(ctx, heavy, n):
        hw = equivariant_weight(hv, weights)
        for r in range(ctx.D + 1):
            for psis in itertools.combinations(range(1, ctx.D + 1), r):
                psyms = tuple(Symbol(Kind.PSI, i) for i in psis)
                rest = m - hw - equivariant_weight(psyms, weights)
                if rest < 0:
                    continue
                for xexp in _x_exponents(weights, rest):
                    xs = tuple(Symbol(Kind.X, i + 1) for i, e in enumerate(xexp) for _ in range(e))
                    sign, mono = _canon(ctx, hv + psyms + xs)
                    if sign:
                        buckets.setdefault(fermion_degree(ctx, mono), []).append(mono)
    for j in buckets:
        buckets[j].sort(key=lambda mono: [ctx.sort_key(s) for s in mono] + [len(mono)])
    return Slice(n, m, dict(sorted(buckets.items())))


def operator_matrix(op, source: list, target: list) -> list[dict]:
    """Rows: images of source monomials expanded in the target basis."""
    index = {mono: i for i, mono in enumerate(target)}
    rows = []
    for mono in source:
        img = op(mono)
        row = {}
        for t, c in img.items():
            if t not in index:
                raise ValueError(f"operator leaves the target slice: {t}")
            row[index[t]] = c
        rows.append(row)
    return rows


class SliceComplex:
    """Lazily enumerated slices and boundary matrices of one complex."""

    def __init__(self, bc: BrstComplex, cache_dir: str | os.PathLike | None = None):
        pot = bc.potential
        if not pot.homogeneous:
            raise ValueError("slicing needs coordinate weights")
        self.bc = bc
        self.ctx = bc.ctx
        self.weights = pot.weights
        self.a = pot.a
        self._slices: dict = {}
        self._matrices: dict = {}
        self._ranks: dict = {}
        self.cache_dir = Path(cache_dir) if cache_dir else None
        enumerate_slice(self.ctx, self.weights, 0, 0)  # validates weights

    def slice(self, n: int, m: int) -> Slice:
        key = (n, m)
        if key not in self._slices:
            self._slices[key] = enumerate_slice(self.ctx, self.weights, n, m)
        return self._slices[key]

    def basis(self, n: int, m: int, j: int) -> list:
        return self.slice(n, m).basis(j)

    def _apply_d(self, mono):
        return nth_product(self.bc.charge, 0, VAElement(self.ctx, {mono: 1}))

    def boundary(self, n: int, m: int, j: int) -> list[dict]:
        """Matrix of the differential from ``(n, m, j)`` to ``(n, m + a, j - 1)``."""
        key = (n, m, j)
        if key not in self._matrices:
            cached = self._load(key)
            if cached is None:
                cached = operator_matrix(self._apply_d, self.basis(n, m, j), self.basis(n, m + self.a, j - 1))
                self._store(key, cached)
            self._matrices[key] = cached
        return self._matrices[key]

    def boundary_rank(self, n: int, m: int, j: int) -> int:
        key = (n, m, j)
        if key not in self._ranks:
            self._ranks[key] = rank(self.boundary(n, m, j)) if self.basis(n, m, j) else 0
        return self._ranks[key]

    def cohomology_dim(self, n: int, m: int, j: int) -> int:
        dim = len(self.basis(n, m, j))
        if not dim:
            return 0
        return dim - self.boundary_rank(n, m, j) - self.boundary_rank(n, m - self.a, j + 1)

    def squares_to_zero(self, n: int, m: int, j: int) -> bool:
        first = self.boundary(n, m, j)
        second = self.boundary(n, m + self.a, j - 1)
        return is_zero(compose(first, second)) if first and second else True

    def j_range(self, n: int) -> range:
        return range(-n, self.ctx.D * (n + 1) + 1)

    # optional on-disk cache of boundary matrices
    def _cache_path(self, key):
        pot = self.bc.potential
        tag = f"{pot.f.render()}|{pot.weights}|{key}"
        digest = hashlib.sha256(tag.encode()).hexdigest()[:24]
        return self.cache_dir / f"d_{digest}.json"

    def _load(self, key):
        if not self.cache_dir:
            return None
        path = self._cache_path(key)
        if not path.exists():
            return None
        data = json.loads(path.read_text())
        return [{int(k): Fraction(v) for k, v in row.items()} for row in data]

    def _store(self, key, rows):
        if not self.cache_dir:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        data = [{str(k): str(v) for k, v in row.items()} for row in rows]
        self._cache_path(key).write_text(json.dumps(data))


def window_keys(n_max: int, m_min: int, m_max: int) -> list[GradingKey]:
    return [GradingKey(n, m) for n in range(n_max + 1) for m in range(m_min, m_max + 1)]


@dataclass
class CohomologyReport:
    potential: str
    weights: tuple
    a: int
    dims: dict = field(default_factory=dict)  # (n, m, j) -> dim H
    chain_dims: dict = field(default_factory=dict)  # (n, m, j) -> dim C
    square_zero: bool = True

    def slice_keys(self) -> list:
        return sorted({(n, m) for n, m, _ in self.chain_dims})

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def euler(self, n: int, m: int) -> int:
        return sum(_sgn(j) * d for (nn, mm, j), d in self.dims.items() if (nn, mm) == (n, m))

    def chain_euler(self, n: int, m: int) -> int:
        return sum(_sgn(j) * d for (nn, mm, j), d in self.chain_dims.items() if (nn, mm) == (n, m))

    def to_dict(self) -> dict:
        slices = []
        for n, m in self.slice_keys():
            dims = {str(j): d for (nn, mm, j), d in sorted(self.dims.items()) if (nn, mm) == (n, m)}
            slices.append({"n": n, "m": m, "dims": dims, "euler": self.euler(n, m),
                           "chain_dims": {str(j): d for (nn, mm, j), d in sorted(self.chain_dims.items())
                                          if (nn, mm) == (n, m)}})
        return {"slices": slices, "potential": self.potential, "weights": list(self.weights),
                "a": self.a, "square_zero": self.square_zero}


def cohomology(bc: BrstComplex, window: Iterable, cache_dir=None,
               complex_: SliceComplex | None = None) -> CohomologyReport:
    """Exact cohomology dimensions at every ``(n, m, j)`` of the window slices."""
    sc = complex_ or SliceComplex(bc, cache_dir)
    pot = bc.potential
    rep = CohomologyReport(pot.label(), pot.weights, pot.a)
    for key in window:
        n, m = (key.n, key.m) if isinstance(key, GradingKey) else key
        sl = sc.slice(n, m)
        for j, basis in sl.buckets.items():
            rep.chain_dims[(n, m, j)] = len(basis)
            rep.dims[(n, m, j)] = sc.cohomology_dim(n, m, j)
            if not sc.squares_to_zero(n, m, j):
                rep.square_zero = False
    return rep


def charge_line(sc: SliceComplex, n: int, c: int) -> list[tuple[int, int]]:
    """The ``(m, j)`` points of conformal weight ``n`` with ``a*j + m = c``."""
    return [(c - sc.a * j, j) for j in sc.j_range(n)]


def euler_character(bc: BrstComplex, n_max: int, c_min: int, c_max: int,
                    complex_: SliceComplex | None = None) -> dict:
    """``(n, c) -> (chain Euler, cohomology Euler)`` along lines of constant charge.

    ``c = a*j + m`` is the exponent of ``u = z^(1/a)``; each count is
    ``sum_j (-1)^j dim``.
    """
    sc = complex_ or SliceComplex(bc)
    table = {}
    for n in range(n_max + 1):
        for c in range(c_min, c_max + 1):
            chain = hom = 0
            for m, j in charge_line(sc, n, c):
                dim = len(sc.basis(n, m, j))
                if not dim:
                    continue
                chain += _sgn(j) * dim
                hom += _sgn(j) * sc.cohomology_dim(n, m, j)
            table[(n, c)] = (chain, hom)
    return table


def direct_sum(f: Potential, g: Potential) -> Potential:
    """``f(x) + g(x')`` on the product space, coordinates of ``f`` first."""
    if f.a != g.a:
        raise ValueError(f"summands must share the homogeneity weight (got {f.a} and {g.a})")
    D = f.D + g.D
    out = Polyvector(D)
    for (xexp, _), c in f.f.items():
        out = out + Polyvector.monomial(D, tuple(xexp) + (0,) * g.D, (), c)
    for (xexp, _), c in g.f.items():
        out = out + Polyvector.monomial(D, (0,) * f.D + tuple(xexp), (), c)
    return Potential(out, f.weights + g.weights, f.a, source=f"({f.label()}) + ({g.label()})")


def tensor_check(f: Potential, g: Potential, n_max: int, m_min: int, m_max: int,
                 factor_margin: int | None = None) -> Report:
    """Cohomology of ``f + g`` against the graded convolution of the factors."""
    fg = direct_sum(f, g)
    rep = Report(f"direct sum {fg.label()}")
    margin = factor_margin if factor_margin is not None else 2 * f.a
    lo, hi = m_min - margin, m_max + margin
    tables = []
    for pot in (f, g):
        sc = SliceComplex(BrstComplex.build(pot))
        dims = {}
        for n in range(n_max + 1):
            for m in range(lo, hi + 1):
                for j in sc.slice(n, m).buckets:
                    d = sc.cohomology_dim(n, m, j)
                    if d:
                        dims[(n, m, j)] = d
        edge = [k for k in dims if k[1] in (lo, hi)]
        rep.add(f"factor {pot.label()} window sufficient", not edge, edge=[str(k) for k in edge])
        tables.append(dims)
    conv: dict = {}
    for (n1, m1, j1), d1 in tables[0].items():
        for (n2, m2, j2), d2 in tables[1].items():
            key = (n1 + n2, m1 + m2, j1 + j2)
            conv[key] = conv.get(key, 0) + d1 * d2
    total = cohomology(BrstComplex.build(fg), window_keys(n_max, m_min, m_max))
    mismatches = {}
    for key, d in total.dims.items():
        if conv.get(key, 0) != d:
            mismatches[str(key)] = (d, conv.get(key, 0))
    for key, d in conv.items():
        n, m, _ = key
        if n <= n_max and m_min <= m <= m_max and total.dims.get(key, 0) != d:
            mismatches[str(key)] = (total.dims.get(key, 0), d)
    rep.add("dims(f+g) = dims(f) * dims(g)", not mismatches, mismatches=mismatches)
    rep.values["nonzero"] = {str(k): v for k, v in total.nonzero().items()}
    return rep


# ------------------------------------------------------------------------ BV


def bv_identities(bc: BrstComplex, n_max: int = 3, m_min: int | None = None,
                  m_max: int | None = None) -> Report:
    """Homotopy identities behind the BV comparison, on every slice basis vector.

    (i) ``G_(1)^2 = 0`` and ``[d, G_(1)] = 0``; (ii) ``[d, Q_(0)] = 0``;
    (iii) ``[Q_(0), G_(1)] = L_(1)``.  Brackets of odd operators are
    anticommutators.
    """
    a = bc.potential.a
    m_min = -2 * a if m_min is None else m_min
    m_max = 4 * a if m_max is None else m_max
    ctx = bc.ctx
    cs = bc.currents
    sc = SliceComplex(bc)
    G1 = lambda v: nth_product(cs.G, 1, v)
    Q0 = lambda v: nth_product(cs.Q, 0, v)
    L1 = lambda v: nth_product(cs.L, 1, v)
    d = bc.d
    bad = {"G1G1": [], "dG1": [], "dQ0": [], "Q0G1": []}
    count = 0
    for n in range(n_max + 1):
        for m in range(m_min, m_max + 1):
            for j, basis in sc.slice(n, m).buckets.items():
                for mono in basis:
                    v = VAElement(ctx, {mono: 1})
                    count += 1
                    g1 = G1(v)
                    if G1(g1):
                        bad["G1G1"].append(v.render())
                    if d(g1) + G1(d(v)):
                        bad["dG1"].append(v.render())
                    q0 = Q0(v)
                    if d(q0) + Q0(d(v)):
                        bad["dQ0"].append(v.render())
                    if Q0(g1) + G1(q0) != L1(v):
                        bad["Q0G1"].append(v.render())
    rep = Report(f"BV homotopy identities, f = {bc.potential.label()}")
    rep.add("G_(1) G_(1) = 0", not bad["G1G1"], offending=bad["G1G1"][:5])
    rep.add("[d, G_(1)] = 0", not bad["dG1"], offending=bad["dG1"][:5])
    rep.add("[d, Q_(0)] = 0", not bad["dQ0"], offending=bad["dQ0"][:5])
    rep.add("[Q_(0), G_(1)] = L_(1)", not bad["Q0G1"], offending=bad["Q0G1"][:5])
    rep.values["basis vectors checked"] = count
    return rep


def _polyvector_basis(D: int, weights, m_max: int, psi_degree: int) -> list:
    out = []
    for psis in itertools.combinations(range(1, D + 1), psi_degree):
        base = -sum(weights[i - 1] for i in psis)
        for target in range(0, m_max - base + 1):
            for xexp in _x_exponents(weights, target):
                out.append((xexp, psis))
    return out


def classical_bv_rank(pot: Potential, m_cut: int) -> dict:
    """Cohomology of ``{f,-} + Delta`` on polyvectors truncated at weight ``m_cut``.

    Setting the BV parameter to 1 breaks the weight grading to a filtration;
    the truncated estimate at degree ``j`` is
    ``dim C^j - rank(d on C^j) - rank(d on C^(j+1) truncated at m_cut - a)``.
    """
    D, w, a = pot.D, pot.weights, pot.a
    f = pot.f

    def bv_d(p):
        return schouten_with_function(f, p) + divergence(p)

    ranks = {}
    out = {}
    bases = {j: _polyvector_basis(D, w, m_cut, j) for j in range(D + 1)}
    low = {j: _polyvector_basis(D, w, m_cut - a, j) for j in range(D + 1)}

    def d_rank(basis):
        rows = []
        for xexp, psis in basis:
            img = bv_d(Polyvector.monomial(D, xexp, psis))
            rows.append({k: c for k, c in img.items()})
        cols = {}
        sparse = []
        for row in rows:
            sparse.append({cols.setdefault(k, len(cols)): c for k, c in row.items()})
        return rank(sparse)

    for j in range(D + 1):
        ranks[j] = (d_rank(bases[j]) if j > 0 else 0, d_rank(low[j + 1]) if j < D else 0)
        out[j] = len(bases[j]) - ranks[j][0] - ranks[j][1]
    return out


def bv_cohomology(bc: BrstComplex, n_max: int = 3, m_min: int | None = None,
                  m_max: int | None = None, cuts: tuple = (8, 12, 16)) -> Report:
    """E^1 acyclicity certificates for ``n >= 1`` and classical BV ranks at ``n = 0``."""
    pot = bc.potential
    a = pot.a
    m_min = -2 * a if m_min is None else m_min
    m_max = 4 * a if m_max is None else m_max
    rep = Report(f"BV cohomology, f = {pot.label()}")
    ctx = bc.ctx
    cs = bc.currents
    sc = SliceComplex(bc)
    for n in range(1, n_max + 1):
        ok = True
        for m in range(m_min, m_max + 1):
            for j, basis in sc.slice(n, m).buckets.items():
                for mono in basis:
                    v = VAElement(ctx, {mono: 1})
                    g1 = nth_product(cs.G, 1, v)
                    q0 = nth_product(cs.Q, 0, v)
                    if nth_product(cs.Q, 0, g1) + nth_product(cs.G, 1, q0) != n * v:
                        ok = False
                    if bc.d(q0) + nth_product(cs.Q, 0, bc.d(v)):
                        ok = False
                    if bc.d(g1) + nth_product(cs.G, 1, bc.d(v)):
                        ok = False
        rep.add(f"E1 acyclic at n={n} (L_(1) = {n} via Q_(0) homotopy)", ok and n != 0)
    estimates = {cut: classical_bv_rank(pot, cut) for cut in cuts}
    totals = {cut: sum(v.values()) for cut, v in estimates.items()}
    stable = len(set(totals.values())) == 1
    rep.values["classical BV rank by cut"] = {str(k): v for k, v in totals.items()}
    if stable:
        rep.values["classical BV rank"] = next(iter(totals.values()))
        rep.values["classical BV rank by degree"] = {str(j): d for j, d in estimates[cuts[-1]].items()}
        rep.add("classical BV rank stabilized", True)
    else:
        rep.values["classical BV rank"] = "inconclusive"
        rep.add("classical BV rank stabilized", False, totals=totals)
    return rep
